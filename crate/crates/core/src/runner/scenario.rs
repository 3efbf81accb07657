//! Named scenarios and their execution.

use std::path::PathBuf;
use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::output::{Axis, ResultTable, TableMetadata};
use super::RunnerError;
use crate::atomic::{AtomParams, CoefficientSource, DriveConfig, SignConvention, VortexSquare};
use crate::diffraction::{
    detuning_maps, length_sweep, spatial_maps, DiffractionConfig, DiffractionError, GratingModel, OrderMaps,
};
use crate::fields::{CompositeVortex, GridSpec, StandingWave};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Custom,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 8] = [
        Self::Fig2,
        Self::Fig3,
        Self::Fig4,
        Self::Fig5,
        Self::Fig6,
        Self::Fig7,
        Self::Fig8,
        Self::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
            Self::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.as_str() == s)
    }

    /// What the named scenario computes; `None` for `custom`.
    pub fn fixed_kind(self) -> Option<ScenarioKind> {
        match self {
            Self::Fig2 => Some(ScenarioKind::Detuning),
            Self::Fig8 => Some(ScenarioKind::LengthSweep),
            Self::Custom => None,
            _ => Some(ScenarioKind::Spatial),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Per-order maps over `(x₁/w, y₁/w)`.
    Spatial,
    /// Per-order intensities versus `L/ξ` at one point.
    LengthSweep,
    /// Per-order maps over `(Δc, ΔLG)` with a constant vortex amplitude `Ω`.
    Detuning,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Spatial => "spatial",
            Self::LengthSweep => "length-sweep",
            Self::Detuning => "detuning",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Susceptibility {
    /// Second-order expansion with Bessel closed-form orders.
    #[default]
    Expanded,
    /// Unexpanded susceptibility with orders by quadrature.
    Full,
}

/// Axes of the detuning and interaction-length sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub detuning_min: f64,
    pub detuning_max: f64,
    pub detuning_points: usize,
    pub length_min: f64,
    pub length_max: f64,
    pub length_points: usize,
    /// Transverse point of the length sweep.
    pub r_over_w: f64,
    pub phi_over_pi: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            detuning_min: -3.0,
            detuning_max: 3.0,
            detuning_points: 121,
            length_min: 0.0,
            length_max: 100.0,
            length_points: 501,
            r_over_w: 1.0,
            phi_over_pi: 0.25,
        }
    }
}

/// `points` values from `min` to `max`, with exact endpoints.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { max } else { min + (max - min) * (i as f64 / last) })
        .collect()
}

impl SweepSpec {
    pub fn detuning_axis(&self) -> Vec<f64> {
        linspace(self.detuning_min, self.detuning_max, self.detuning_points)
    }

    pub fn length_axis(&self) -> Vec<f64> {
        linspace(self.length_min, self.length_max, self.length_points)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.detuning_min < self.detuning_max) || self.detuning_points < 2 {
            return Err("sweep: detuning_min < detuning_max and detuning_points >= 2 required".into());
        }
        if !(self.length_min >= 0.0 && self.length_min < self.length_max) || self.length_points < 2 {
            return Err("sweep: 0 <= length_min < length_max and length_points >= 2 required".into());
        }
        if !(self.r_over_w >= 0.0 && self.r_over_w.is_finite() && self.phi_over_pi.is_finite()) {
            return Err("sweep: r_over_w must be >= 0 and phi_over_pi finite".into());
        }
        Ok(())
    }
}

/// A fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub kind: ScenarioKind,
    pub atom: AtomParams,
    /// Detunings, probe amplitude and vortex convention. The coupling and
    /// vortex amplitudes come from `sw` and `beam`.
    pub drive: DriveConfig,
    pub beam: CompositeVortex,
    pub sw: StandingWave,
    pub diffraction: DiffractionConfig,
    pub grid: GridSpec,
    pub sweep: SweepSpec,
    pub coefficients: CoefficientSource,
    pub sign: SignConvention,
    pub susceptibility: Susceptibility,
    pub output_dir: PathBuf,
}

fn detunings(delta_p: f64, delta_c: f64, delta_lg: f64) -> DriveConfig {
    DriveConfig { delta_p, delta_c, delta_lg, ..Default::default() }
}

impl Scenario {
    /// Parameter block of a named scenario, or the generic defaults for
    /// `custom` (which also needs `kind`).
    pub fn defaults(name: ScenarioName, kind: Option<ScenarioKind>) -> Self {
        let common = Self {
            name,
            kind: name.fixed_kind().or(kind).unwrap_or(ScenarioKind::Spatial),
            atom: AtomParams::default(),
            drive: DriveConfig::default(),
            beam: CompositeVortex::equal_oam(1.5, 1),
            sw: StandingWave::new(0.2),
            diffraction: DiffractionConfig::default(),
            grid: GridSpec::default(),
            sweep: SweepSpec::default(),
            coefficients: CoefficientSource::default(),
            sign: SignConvention::default(),
            susceptibility: Susceptibility::default(),
            output_dir: PathBuf::from("out"),
        };
        let with = |drive: DriveConfig, omega_c0: f64, beam: CompositeVortex, max_order: u32| Self {
            drive,
            sw: StandingWave::new(omega_c0),
            beam,
            diffraction: DiffractionConfig { max_order, ..Default::default() },
            ..common.clone()
        };
        match name {
            ScenarioName::Fig2 => with(detunings(0.0, 0.0, 0.0), 0.5, CompositeVortex::equal_oam(1.5, 0), 3),
            ScenarioName::Fig3 => with(
                detunings(0.0, -1.0, 2.0),
                0.5,
                CompositeVortex { omega: 1.1, waist: 1.0, l1: 4, l2: -1 },
                3,
            ),
            ScenarioName::Fig4 => with(detunings(0.0, 0.0, 0.0), 0.2, CompositeVortex::equal_oam(1.5, 0), 2),
            ScenarioName::Fig5 => with(detunings(0.0, 0.0, 0.0), 0.2, CompositeVortex::equal_oam(1.5, 2), 2),
            ScenarioName::Fig6 => with(detunings(0.0, -1.0, 2.0), 0.5, CompositeVortex::equal_oam(1.5, 0), 3),
            ScenarioName::Fig7 => with(detunings(0.0, -1.0, 2.0), 0.5, CompositeVortex::equal_oam(1.5, 2), 3),
            ScenarioName::Fig8 => with(detunings(0.0, 0.0, 0.0), 0.2, CompositeVortex::equal_oam(1.5, 0), 3),
            ScenarioName::Custom => common,
        }
    }

    pub fn grating_model(&self) -> GratingModel {
        match self.susceptibility {
            Susceptibility::Expanded => GratingModel::Expanded(self.coefficients),
            Susceptibility::Full => GratingModel::Full(self.sign),
        }
    }

    /// Checks every parameter block; the message names the violated invariant.
    pub fn validate(&self) -> Result<(), String> {
        if self.name != ScenarioName::Custom && self.name.fixed_kind() != Some(self.kind) {
            return Err(format!("kind: scenario {} is always {}", self.name.as_str(), self.name.fixed_kind().map_or("", |k| k.as_str())));
        }
        self.atom.validate().map_err(|e| e.to_string())?;
        self.beam.validate().map_err(|e| e.to_string())?;
        self.sw.validate().map_err(|e| e.to_string())?;
        self.diffraction.validate().map_err(|e| e.to_string())?;
        self.grid.validate().map_err(|e| e.to_string())?;
        self.sweep.validate()?;
        let d = &self.drive;
        if ![d.delta_p, d.delta_c, d.delta_lg, d.omega_p].iter().all(|v| v.is_finite()) {
            return Err("drive: detunings and omega_p must be finite".into());
        }
        if !(d.omega_p >= 0.0) {
            return Err("drive: omega_p must be >= 0".into());
        }
        Ok(())
    }

    /// The flag settings recorded with every table.
    pub fn flags(&self) -> Vec<(String, String)> {
        let kebab = |s: &str| s.to_string();
        vec![
            ("coefficients".into(), kebab(match self.coefficients {
                CoefficientSource::Rederived => "rederived",
                CoefficientSource::AsPrinted => "as-printed",
            })),
            ("sign".into(), kebab(match self.sign {
                SignConvention::Physical => "physical",
                SignConvention::AsPrinted => "as-printed",
            })),
            ("vortex_square".into(), kebab(match self.drive.vortex_square {
                VortexSquare::Hermitian => "hermitian",
                VortexSquare::Analytic => "analytic",
            })),
            ("susceptibility".into(), kebab(match self.susceptibility {
                Susceptibility::Expanded => "expanded",
                Susceptibility::Full => "full",
            })),
            ("kind".into(), self.kind.as_str().into()),
        ]
    }
}

fn numerical(s: &Scenario, source: DiffractionError) -> RunnerError {
    RunnerError::Numerical { scenario: s.name.as_str().into(), source }
}

fn metadata(s: &Scenario, nan_cells: usize, extended_cells: usize) -> TableMetadata {
    TableMetadata {
        scenario: s.name.as_str().into(),
        flags: s.flags(),
        version: env!("CARGO_PKG_VERSION").into(),
        nan_cells,
        extended_cells,
        runtime_seconds: 0.0,
    }
}

fn order_tables(s: &Scenario, maps: OrderMaps, rows: Axis, cols: Axis) -> Result<Vec<ResultTable>, RunnerError> {
    maps.maps
        .into_iter()
        .enumerate()
        .map(|(n, values)| {
            let nans = values.iter().filter(|v| v.is_nan()).count();
            ResultTable::new(
                &format!("{}_order{n}", s.name.as_str()),
                Axis { values: maps.row_axis.clone(), ..rows.clone() },
                Axis { values: maps.col_axis.clone(), ..cols.clone() },
                values,
                metadata(s, nans, maps.extended_cells),
            )
        })
        .collect()
}

/// Runs a validated scenario. Tables carry the scenario's runtime.
pub fn run_scenario(s: &Scenario) -> Result<Vec<ResultTable>, RunnerError> {
    s.validate().map_err(RunnerError::Validation)?;
    let start = Instant::now();
    let model = s.grating_model();
    let mut tables = match s.kind {
        ScenarioKind::Spatial => {
            let maps = spatial_maps(&s.atom, &s.drive, &s.beam, &s.sw, &s.diffraction, &s.grid, model)
                .map_err(|e| numerical(s, e))?;
            order_tables(s, maps, Axis::new("y1/w", "w", vec![]), Axis::new("x1/w", "w", vec![]))?
        }
        ScenarioKind::Detuning => {
            let axis = s.sweep.detuning_axis();
            let maps = detuning_maps(
                &s.atom,
                &s.drive,
                Complex64::new(s.beam.omega, 0.0),
                &s.sw,
                &s.diffraction,
                &axis,
                &axis,
                model,
            )
            .map_err(|e| numerical(s, e))?;
            order_tables(s, maps, Axis::new("delta_lg", "gamma", vec![]), Axis::new("delta_c", "gamma", vec![]))?
        }
        ScenarioKind::LengthSweep => {
            let lengths = s.sweep.length_axis();
            let sweep = length_sweep(
                &s.atom,
                &s.drive,
                &s.beam,
                (s.sweep.r_over_w, s.sweep.phi_over_pi),
                &s.sw,
                &s.diffraction,
                &lengths,
                model,
            )
            .map_err(|e| numerical(s, e))?;
            let orders: Vec<f64> = (0..=s.diffraction.max_order).map(f64::from).collect();
            let length_axis = Axis::new("L/xi", "xi", lengths.clone());
            let shares = Array2::from_shape_vec((lengths.len(), 1), sweep.shares.clone())
                .map_err(|e| RunnerError::Validation(e.to_string()))?;
            let share_nans = sweep.shares.iter().filter(|v| v.is_nan()).count();
            vec![
                ResultTable::new(
                    &format!("{}_intensity", s.name.as_str()),
                    length_axis.clone(),
                    Axis::new("order", "", orders),
                    sweep.intensities,
                    metadata(s, 0, 0),
                )?,
                ResultTable::new(
                    &format!("{}_zero_order_share", s.name.as_str()),
                    length_axis,
                    Axis::new("share", "", vec![0.0]),
                    shares,
                    metadata(s, share_nans, 0),
                )?,
            ]
        }
    };
    let runtime = start.elapsed().as_secs_f64();
    for t in &mut tables {
        t.metadata.runtime_seconds = runtime;
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caption_parameter_blocks() {
        let f2 = Scenario::defaults(ScenarioName::Fig2, None);
        assert_eq!((f2.drive.delta_p, f2.sw.omega_c0, f2.beam.omega, f2.diffraction.length_over_xi), (0.0, 0.5, 1.5, 50.0));
        assert_eq!((f2.sweep.detuning_min, f2.sweep.detuning_max, f2.sweep.detuning_points), (-3.0, 3.0, 121));

        let f3 = Scenario::defaults(ScenarioName::Fig3, None);
        assert_eq!((f3.drive.delta_p, f3.drive.delta_c, f3.drive.delta_lg), (0.0, -1.0, 2.0));
        assert_eq!((f3.sw.omega_c0, f3.beam.omega, f3.beam.l1, f3.beam.l2), (0.5, 1.1, 4, -1));
        assert_eq!(f3.diffraction.length_over_xi, 50.0);

        for (name, l) in [(ScenarioName::Fig4, 0), (ScenarioName::Fig5, 2)] {
            let f = Scenario::defaults(name, None);
            assert_eq!((f.drive.delta_p, f.drive.delta_c, f.drive.delta_lg), (0.0, 0.0, 0.0));
            assert_eq!((f.sw.omega_c0, f.beam.omega, f.beam.l1, f.beam.l2), (0.2, 1.5, l, -l));
            assert_eq!((f.diffraction.length_over_xi, f.diffraction.max_order), (50.0, 2));
            assert_eq!(f.grid.points_per_axis, 301);
        }
        for (name, l) in [(ScenarioName::Fig6, 0), (ScenarioName::Fig7, 2)] {
            let f = Scenario::defaults(name, None);
            assert_eq!((f.drive.delta_p, f.drive.delta_c, f.drive.delta_lg), (0.0, -1.0, 2.0));
            assert_eq!((f.sw.omega_c0, f.beam.omega, f.beam.l1, f.beam.l2), (0.5, 1.5, l, -l));
            assert_eq!(f.diffraction.max_order, 3);
        }
        let f8 = Scenario::defaults(ScenarioName::Fig8, None);
        assert_eq!((f8.drive.delta_p, f8.drive.delta_c, f8.drive.delta_lg), (0.0, 0.0, 0.0));
        assert_eq!((f8.sweep.r_over_w, f8.sweep.phi_over_pi), (1.0, 0.25));
        assert_eq!((f8.sweep.length_min, f8.sweep.length_max, f8.sweep.length_points), (0.0, 100.0, 501));
        assert_eq!((f8.sw.omega_c0, f8.beam.omega), (0.2, 1.5));
    }

    #[test]
    fn common_defaults() {
        for name in ScenarioName::ALL {
            let s = Scenario::defaults(name, Some(ScenarioKind::Spatial));
            assert_eq!(s.atom, AtomParams { gamma3: 1.0, gamma4: 1.0, gamma2: 1e-3 });
            assert_eq!((s.diffraction.period_over_wavelength, s.diffraction.slit_count), (4.0, 5));
            assert_eq!(s.beam.waist, 1.0);
            assert!(s.validate().is_ok(), "{name:?}");
        }
    }

    #[test]
    fn linspace_endpoints() {
        let a = linspace(-3.0, 3.0, 121);
        assert_eq!((a[0], a[60], a[120]), (-3.0, 0.0, 3.0));
        assert_eq!(linspace(0.0, 100.0, 501)[5], 1.0);
    }

    #[test]
    fn named_scenarios_fix_their_kind() {
        let mut s = Scenario::defaults(ScenarioName::Fig4, None);
        s.kind = ScenarioKind::LengthSweep;
        assert!(s.validate().unwrap_err().contains("kind"));
    }
}
