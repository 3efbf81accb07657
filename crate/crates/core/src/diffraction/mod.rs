//! Grating transmission and Fraunhofer diffraction orders.
//!
//! Lengths along the grating are in units of the period `Λx`, which is also
//! taken as the amplitude unit, so every intensity is normalised by `Λx²`
//! and a transparent grating has `I₀ = 1`.
//!
//! Order amplitudes have two independent routes: the Bessel closed form
//!
//! `Eₙ = iⁿ·exp[iL(χ⁽¹⁾ + ½χ⁽³⁾Ωc0²)]·Jₙ(−Lχ⁽³⁾Ωc0²/2)`
//!
//! and direct quadrature of the Fourier integral in [`quadrature`]. The
//! intensities are `|Eₙ|²` either way.

pub mod bessel;
mod maps;
pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atomic::{AtomicError, ChiExpansion};
use crate::fields::FieldError;

pub use bessel::{bessel_j_complex, EXTENDED_GUARD, SERIES_GUARD};
pub use maps::{detuning_maps, length_sweep, point_spectrum, spatial_map, spatial_maps, GratingModel, LengthSweep, OrderMaps};
pub use quadrature::{order_amplitude_quadrature, ExpandedProfile, FnProfile, FullProfile, SusceptibilityProfile};

/// Exponents above this overflow `f64`.
pub const MAX_EXPONENT: f64 = 700.0;

/// Largest fraction of singular cells tolerated in a map.
pub const MAX_SINGULAR_FRACTION: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffractionError {
    #[error("Bessel argument |z| = {modulus} exceeds the series guard {guard}")]
    ArgumentTooLarge { modulus: f64, guard: f64 },
    #[error("transmission overflow: exponent {exponent} (gain configuration)")]
    Overflow { exponent: f64 },
    #[error("quadrature did not converge: relative change {difference:e} at {panels} panels")]
    QuadratureNonConvergent { difference: f64, panels: usize },
    #[error("{count} of {total} cells hit a singular denominator")]
    TooManySingularCells { count: usize, total: usize },
    #[error("invalid diffraction configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Atomic(#[from] AtomicError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub(crate) fn check_exponent(re: f64) -> Result<(), DiffractionError> {
    if re > MAX_EXPONENT || re.is_nan() {
        return Err(DiffractionError::Overflow { exponent: re });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffractionConfig {
    /// `Λx/λp`.
    pub period_over_wavelength: f64,
    /// Number of illuminated grating periods.
    pub slit_count: u32,
    /// Interaction length in units of ξ.
    pub length_over_xi: f64,
    /// Highest order reported.
    pub max_order: u32,
}

impl Default for DiffractionConfig {
    fn default() -> Self {
        Self { period_over_wavelength: 4.0, slit_count: 5, length_over_xi: 50.0, max_order: 3 }
    }
}

impl DiffractionConfig {
    pub fn validate(&self) -> Result<(), DiffractionError> {
        if !(self.period_over_wavelength > 0.0 && self.period_over_wavelength.is_finite()) {
            return Err(DiffractionError::InvalidConfig(format!(
                "period_over_wavelength must be > 0, got {}",
                self.period_over_wavelength
            )));
        }
        if self.slit_count == 0 {
            return Err(DiffractionError::InvalidConfig("slit_count must be positive".into()));
        }
        if !(self.length_over_xi >= 0.0 && self.length_over_xi.is_finite()) {
            return Err(DiffractionError::InvalidConfig(format!(
                "length_over_xi must be >= 0, got {}",
                self.length_over_xi
            )));
        }
        let propagating = self.period_over_wavelength.floor();
        if self.max_order as f64 > propagating {
            return Err(DiffractionError::InvalidConfig(format!(
                "max_order {} exceeds floor(period_over_wavelength) = {propagating}: |sin theta| would exceed 1",
                self.max_order
            )));
        }
        Ok(())
    }

    pub fn with_length(self, length_over_xi: f64) -> Self {
        Self { length_over_xi, ..self }
    }
}

/// Intensities of orders `0..=max_order` and the zero-order share.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSpectrum {
    pub intensities: Vec<f64>,
    /// `I₀ / Σₙ Iₙ` over the listed orders; NaN when every order is zero.
    pub zero_order_share: f64,
    /// Whether the Bessel argument lay outside the series guard.
    pub extended_range: bool,
}

impl OrderSpectrum {
    fn from_intensities(intensities: Vec<f64>, extended_range: bool) -> Self {
        let total: f64 = intensities.iter().sum();
        let zero_order_share = if total > 0.0 { intensities[0] / total } else { f64::NAN };
        Self { intensities, zero_order_share, extended_range }
    }
}

/// `T = e^(−Im(χ)L)·e^(i·Re(χ)L)`.
pub fn transmission(chi: Complex64, length_over_xi: f64) -> Result<Complex64, DiffractionError> {
    if !chi.is_finite() {
        return Err(DiffractionError::InvalidConfig("non-finite susceptibility".into()));
    }
    let exponent = -chi.im * length_over_xi;
    check_exponent(exponent)?;
    Ok(Complex64::from_polar(exponent.exp(), chi.re * length_over_xi))
}

fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Bessel argument `−Lχ⁽³⁾Ωc0²/2`.
pub fn bessel_argument(chi: &ChiExpansion, omega_c0: f64, length_over_xi: f64) -> Complex64 {
    -chi.chi3 * (0.5 * length_over_xi * omega_c0 * omega_c0)
}

/// Closed-form amplitude of order `n`.
///
/// Fails with [`DiffractionError::ArgumentTooLarge`] outside the series guard.
pub fn order_amplitude_closed_form(
    chi: &ChiExpansion,
    omega_c0: f64,
    cfg: &DiffractionConfig,
    n: i32,
) -> Result<Complex64, DiffractionError> {
    let length = cfg.length_over_xi;
    let z = bessel_argument(chi, omega_c0, length);
    let j = bessel_j_complex(n, z)?;
    // iL(χ1 + χ3·Ωc0²/2) = iLχ1 − iz
    let exponent = Complex64::new(0.0, length) * chi.chi1 - Complex64::new(0.0, 1.0) * z;
    check_exponent(exponent.re)?;
    Ok(i_pow(n) * exponent.exp() * j)
}

pub fn order_intensity(
    chi: &ChiExpansion,
    omega_c0: f64,
    cfg: &DiffractionConfig,
    n: i32,
) -> Result<f64, DiffractionError> {
    Ok(order_amplitude_closed_form(chi, omega_c0, cfg, n)?.norm_sqr())
}

/// Closed-form amplitudes of orders `0..=max_order`, valid for any Bessel
/// argument: the scaled Bessel sequence keeps large modulation finite.
pub fn order_amplitudes(
    chi: &ChiExpansion,
    omega_c0: f64,
    cfg: &DiffractionConfig,
) -> Result<(Vec<Complex64>, bool), DiffractionError> {
    let length = cfg.length_over_xi;
    let z = bessel_argument(chi, omega_c0, length);
    if !chi.chi1.is_finite() {
        return Err(DiffractionError::InvalidConfig("non-finite susceptibility".into()));
    }
    let scaled = bessel::j_orders_scaled(cfg.max_order as usize, z)?;
    let exponent =
        Complex64::new(0.0, length) * chi.chi1 - Complex64::new(0.0, 1.0) * z + z.im.abs();
    check_exponent(exponent.re)?;
    let prefactor = exponent.exp();
    let amps = scaled
        .iter()
        .enumerate()
        .map(|(n, j)| i_pow(n as i32) * prefactor * j)
        .collect();
    Ok((amps, z.norm() > SERIES_GUARD))
}

pub fn order_spectrum(
    chi: &ChiExpansion,
    omega_c0: f64,
    cfg: &DiffractionConfig,
) -> Result<OrderSpectrum, DiffractionError> {
    let (amps, extended) = order_amplitudes(chi, omega_c0, cfg)?;
    Ok(OrderSpectrum::from_intensities(amps.iter().map(|a| a.norm_sqr()).collect(), extended))
}

/// `sin²(Mπu) / (M² sin²(πu))`, equal to 1 at integer `u`.
pub fn slit_envelope(slit_count: u32, u: f64) -> f64 {
    let delta = u - u.round();
    if delta == 0.0 {
        return 1.0;
    }
    let m = slit_count as f64;
    let ratio = (m * std::f64::consts::PI * delta).sin() / (m * (std::f64::consts::PI * delta).sin());
    ratio * ratio
}

/// Far-field intensity `|E(u)|²·envelope(u)` at `u = (Λx/λp)·sinθ`, with
/// `E(u)` by quadrature of the expanded susceptibility.
pub fn full_angular_pattern(
    chi: &ChiExpansion,
    omega_c0: f64,
    cfg: &DiffractionConfig,
    sin_theta: &[f64],
) -> Result<Vec<f64>, DiffractionError> {
    if let Some(s) = sin_theta.iter().find(|s| !(s.abs() <= 1.0)) {
        return Err(DiffractionError::InvalidConfig(format!("|sin theta| must be <= 1, got {s}")));
    }
    let profile = ExpandedProfile { chi: *chi, sw: crate::fields::StandingWave::new(omega_c0) };
    let freqs: Vec<f64> = sin_theta.iter().map(|s| cfg.period_over_wavelength * s).collect();
    let amps = quadrature::fourier_amplitudes(
        &profile,
        cfg.length_over_xi,
        &freqs,
        quadrature::BASE_PANELS,
        quadrature::MAX_PANELS,
    )?;
    Ok(amps
        .iter()
        .zip(&freqs)
        .map(|(e, &u)| e.norm_sqr() * slit_envelope(cfg.slit_count, u))
        .collect())
}
