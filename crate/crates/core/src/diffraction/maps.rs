use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{fourier_amplitudes, FullProfile, BASE_PANELS, MAX_PANELS};
use super::{order_spectrum, DiffractionConfig, DiffractionError, OrderSpectrum, MAX_SINGULAR_FRACTION};
use crate::atomic::{
    chi_expansion, AtomParams, AtomicError, CoefficientSource, DriveConfig, SignConvention,
};
use crate::fields::{evaluate_on_grid, vortex_amplitude, vortex_amplitude_polar, CompositeVortex, GridSpec, StandingWave};

/// How the grating's susceptibility profile is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GratingModel {
    /// `χ⁽¹⁾ + Ωc²(x)χ⁽³⁾` with Bessel closed-form orders.
    Expanded(CoefficientSource),
    /// Unexpanded susceptibility, orders by quadrature.
    Full(SignConvention),
}

impl Default for GratingModel {
    fn default() -> Self {
        Self::Expanded(CoefficientSource::Rederived)
    }
}

/// Order intensities at one point of the medium. `drive.omega_c` is ignored;
/// the standing wave sets the coupling profile.
pub fn point_spectrum(
    atom: &AtomParams,
    drive: &DriveConfig,
    sw: &StandingWave,
    cfg: &DiffractionConfig,
    model: GratingModel,
) -> Result<OrderSpectrum, DiffractionError> {
    match model {
        GratingModel::Expanded(source) => {
            let chi = chi_expansion(atom, drive, source)?;
            order_spectrum(&chi, sw.omega_c0, cfg)
        }
        GratingModel::Full(sign) => {
            let profile = FullProfile::new(*atom, *drive, *sw, sign)?;
            let freqs: Vec<f64> = (0..=cfg.max_order).map(f64::from).collect();
            let amps = fourier_amplitudes(&profile, cfg.length_over_xi, &freqs, BASE_PANELS, MAX_PANELS)?;
            Ok(OrderSpectrum::from_intensities(amps.iter().map(|a| a.norm_sqr()).collect(), false))
        }
    }
}

/// Per-order intensity maps over two axes.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderMaps {
    /// Values along the row index.
    pub row_axis: Vec<f64>,
    /// Values along the column index.
    pub col_axis: Vec<f64>,
    /// One map per order `0..=max_order`.
    pub maps: Vec<Array2<f64>>,
    /// Cells left as NaN because of a singular denominator or a Bessel
    /// argument beyond [`super::EXTENDED_GUARD`].
    pub singular_cells: usize,
    /// Cells whose Bessel argument lay outside the series guard.
    pub extended_cells: usize,
}

fn assemble(
    row_axis: Vec<f64>,
    col_axis: Vec<f64>,
    orders: usize,
    cells: Vec<Vec<Result<OrderSpectrum, DiffractionError>>>,
) -> Result<OrderMaps, DiffractionError> {
    let (rows, cols) = (row_axis.len(), col_axis.len());
    let mut maps = vec![Array2::<f64>::from_elem((rows, cols), f64::NAN); orders];
    let mut singular_cells = 0;
    let mut extended_cells = 0;
    for (i, row) in cells.into_iter().enumerate() {
        for (j, cell) in row.into_iter().enumerate() {
            match cell {
                Ok(spec) => {
                    extended_cells += usize::from(spec.extended_range);
                    for (map, v) in maps.iter_mut().zip(spec.intensities) {
                        map[(i, j)] = v;
                    }
                }
                // Beyond the extended guard the cell sits within ~1e-6 of a pole.
                Err(DiffractionError::Atomic(AtomicError::SingularDenominator { .. }))
                | Err(DiffractionError::ArgumentTooLarge { .. }) => singular_cells += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let total = rows * cols;
    if singular_cells as f64 > MAX_SINGULAR_FRACTION * total as f64 {
        return Err(DiffractionError::TooManySingularCells { count: singular_cells, total });
    }
    Ok(OrderMaps { row_axis, col_axis, maps, singular_cells, extended_cells })
}

/// Order intensities over the transverse plane of the vortex. Rows follow
/// `y₁/w`, columns `x₁/w`.
pub fn spatial_maps(
    atom: &AtomParams,
    drive: &DriveConfig,
    beam: &CompositeVortex,
    sw: &StandingWave,
    cfg: &DiffractionConfig,
    grid: &GridSpec,
    model: GratingModel,
) -> Result<OrderMaps, DiffractionError> {
    atom.validate()?;
    beam.validate()?;
    sw.validate()?;
    grid.validate()?;
    cfg.validate()?;
    let cells = evaluate_on_grid(grid, |x, y| {
        let omega_lg = vortex_amplitude(beam, x * beam.waist, y * beam.waist);
        point_spectrum(atom, &drive.with_fields(0.0, omega_lg), sw, cfg, model)
    });
    let axis = grid.axis();
    assemble(axis.clone(), axis, cfg.max_order as usize + 1, cells)
}

/// Single-order convenience wrapper around [`spatial_maps`].
#[allow(clippy::too_many_arguments)]
pub fn spatial_map(
    atom: &AtomParams,
    drive: &DriveConfig,
    beam: &CompositeVortex,
    sw: &StandingWave,
    cfg: &DiffractionConfig,
    grid: &GridSpec,
    model: GratingModel,
    n: u32,
) -> Result<Array2<f64>, DiffractionError> {
    if n > cfg.max_order {
        return Err(DiffractionError::InvalidConfig(format!("order {n} above max_order {}", cfg.max_order)));
    }
    let mut maps = spatial_maps(atom, drive, beam, sw, cfg, grid, model)?;
    Ok(maps.maps.swap_remove(n as usize))
}

/// Order intensities versus the detunings `Δc` (columns) and `ΔLG` (rows)
/// for a fixed vortex amplitude.
#[allow(clippy::too_many_arguments)]
pub fn detuning_maps(
    atom: &AtomParams,
    drive: &DriveConfig,
    omega_lg: Complex64,
    sw: &StandingWave,
    cfg: &DiffractionConfig,
    delta_c_axis: &[f64],
    delta_lg_axis: &[f64],
    model: GratingModel,
) -> Result<OrderMaps, DiffractionError> {
    atom.validate()?;
    sw.validate()?;
    cfg.validate()?;
    let cells: Vec<Vec<_>> = delta_lg_axis
        .par_iter()
        .map(|&delta_lg| {
            delta_c_axis
                .iter()
                .map(|&delta_c| {
                    let d = DriveConfig { delta_c, delta_lg, ..drive.with_fields(0.0, omega_lg) };
                    point_spectrum(atom, &d, sw, cfg, model)
                })
                .collect()
        })
        .collect();
    assemble(delta_lg_axis.to_vec(), delta_c_axis.to_vec(), cfg.max_order as usize + 1, cells)
}

/// Order intensities versus interaction length at one transverse point.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthSweep {
    pub lengths: Vec<f64>,
    /// `intensities[(i, n)]` is order `n` at `lengths[i]`.
    pub intensities: Array2<f64>,
    /// Zero-order share at each length.
    pub shares: Vec<f64>,
    pub omega_lg: Complex64,
}

/// Sweeps `L/ξ` at the transverse point `(r/w, φ/π)`.
#[allow(clippy::too_many_arguments)]
pub fn length_sweep(
    atom: &AtomParams,
    drive: &DriveConfig,
    beam: &CompositeVortex,
    point: (f64, f64),
    sw: &StandingWave,
    cfg: &DiffractionConfig,
    lengths: &[f64],
    model: GratingModel,
) -> Result<LengthSweep, DiffractionError> {
    atom.validate()?;
    beam.validate()?;
    sw.validate()?;
    cfg.validate()?;
    if lengths.iter().any(|l| !(*l >= 0.0)) || lengths.windows(2).any(|w| w[1] < w[0]) {
        return Err(DiffractionError::InvalidConfig("interaction lengths must be nonnegative and ascending".into()));
    }
    let (r_over_w, phi_over_pi) = point;
    let omega_lg = vortex_amplitude_polar(beam, r_over_w, phi_over_pi);
    let d = drive.with_fields(0.0, omega_lg);
    let spectra = lengths
        .par_iter()
        .map(|&l| point_spectrum(atom, &d, sw, &cfg.with_length(l), model))
        .collect::<Result<Vec<_>, _>>()?;
    let orders = cfg.max_order as usize + 1;
    let mut intensities = Array2::zeros((lengths.len(), orders));
    for (i, s) in spectra.iter().enumerate() {
        for (n, v) in s.intensities.iter().enumerate() {
            intensities[(i, n)] = *v;
        }
    }
    Ok(LengthSweep {
        lengths: lengths.to_vec(),
        intensities,
        shares: spectra.iter().map(|s| s.zero_order_share).collect(),
        omega_lg,
    })
}
