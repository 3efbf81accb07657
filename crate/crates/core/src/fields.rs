//! Spatial structure of the coupling fields.
//!
//! Transverse coordinates of the vortex are measured in units of the beam
//! waist; the standing wave is parametrised by the position within one
//! grating period.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("equal-OAM form needs l1 = -l2, got l1 = {l1}, l2 = {l2}")]
    WindingMismatch { l1: i32, l2: i32 },
    #[error("invalid field parameter: {0}")]
    InvalidParameter(String),
}

/// Standing-wave coupling field `Ωc(x) = Ωc0·sin(πx/Λx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandingWave {
    pub omega_c0: f64,
    pub lambda_x: f64,
}

impl StandingWave {
    pub fn new(omega_c0: f64) -> Self {
        Self { omega_c0, lambda_x: 1.0 }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if !(self.omega_c0 >= 0.0 && self.omega_c0.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("omega_c0 must be >= 0, got {}", self.omega_c0)));
        }
        if !(self.lambda_x > 0.0 && self.lambda_x.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("lambda_x must be > 0, got {}", self.lambda_x)));
        }
        Ok(())
    }
}

pub fn sw_amplitude(sw: &StandingWave, x_over_period: f64) -> f64 {
    sw.omega_c0 * (PI * x_over_period).sin()
}

/// Superposition of two Laguerre-Gaussian vortices with `p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeVortex {
    pub omega: f64,
    pub waist: f64,
    pub l1: i32,
    pub l2: i32,
}

impl CompositeVortex {
    /// Equal and opposite charges `l1 = l`, `l2 = −l`.
    pub fn equal_oam(omega: f64, l: i32) -> Self {
        Self { omega, waist: 1.0, l1: l, l2: -l }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if !(self.waist > 0.0 && self.waist.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("waist must be > 0, got {}", self.waist)));
        }
        if !self.omega.is_finite() {
            return Err(FieldError::InvalidParameter("vortex amplitude must be finite".into()));
        }
        Ok(())
    }
}

/// `ρ^|l|` with `0⁰ = 1`.
fn radial_power(rho: f64, l: i32) -> f64 {
    rho.powi(l.abs())
}

/// `Ω·e^(−r²/w²)·[(r/w)^|l₁| e^(i l₁ φ) + (r/w)^|l₂| e^(i l₂ φ)]` with
/// `φ = atan2(y₁, x₁) ∈ (−π, π]`.
pub fn vortex_amplitude(beam: &CompositeVortex, x1: f64, y1: f64) -> Complex64 {
    let rho = x1.hypot(y1) / beam.waist;
    let phi = y1.atan2(x1);
    let envelope = beam.omega * (-rho * rho).exp();
    let term = |l: i32| Complex64::from_polar(radial_power(rho, l), l as f64 * phi);
    envelope * (term(beam.l1) + term(beam.l2))
}

/// `2Ω·e^(−r²/w²)·(r/w)^|l|·cos(lφ)` for `l₁ = −l₂ = l`.
pub fn equal_oam_amplitude(beam: &CompositeVortex, x1: f64, y1: f64) -> Result<f64, FieldError> {
    check_equal_oam(beam)?;
    let rho = x1.hypot(y1) / beam.waist;
    let phi = y1.atan2(x1);
    Ok(equal_oam_radial(beam, rho) * (beam.l1 as f64 * phi).cos())
}

/// Polar form of [`equal_oam_amplitude`] with the azimuth given in units of
/// π, so nodal lines such as `lφ = π/2` evaluate to exactly zero.
pub fn equal_oam_amplitude_polar(
    beam: &CompositeVortex,
    r_over_w: f64,
    phi_over_pi: f64,
) -> Result<f64, FieldError> {
    check_equal_oam(beam)?;
    Ok(equal_oam_radial(beam, r_over_w) * cos_pi(beam.l1 as f64 * phi_over_pi))
}

/// Vortex amplitude at `(r/w, φ/π)`. Equal and opposite charges go through
/// [`equal_oam_amplitude_polar`] so that nodal lines are exact zeros.
pub fn vortex_amplitude_polar(beam: &CompositeVortex, r_over_w: f64, phi_over_pi: f64) -> Complex64 {
    match equal_oam_amplitude_polar(beam, r_over_w, phi_over_pi) {
        Ok(v) => Complex64::new(v, 0.0),
        Err(_) => {
            let phi = PI * phi_over_pi;
            let r = r_over_w * beam.waist;
            vortex_amplitude(beam, r * phi.cos(), r * phi.sin())
        }
    }
}

fn check_equal_oam(beam: &CompositeVortex) -> Result<(), FieldError> {
    if beam.l1 != -beam.l2 {
        return Err(FieldError::WindingMismatch { l1: beam.l1, l2: beam.l2 });
    }
    Ok(())
}

fn equal_oam_radial(beam: &CompositeVortex, rho: f64) -> f64 {
    2.0 * beam.omega * (-rho * rho).exp() * radial_power(rho, beam.l1)
}

/// `cos(πx)`, exact at integers and half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.5 || r == 1.5 {
        0.0
    } else if r == 0.0 {
        1.0
    } else if r == 1.0 {
        -1.0
    } else {
        (PI * r).cos()
    }
}

/// Square transverse grid in units of the waist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_extent: f64,
    pub points_per_axis: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { half_extent: 3.0, points_per_axis: 301 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), FieldError> {
        if !(self.half_extent > 0.0 && self.half_extent.is_finite()) {
            return Err(FieldError::InvalidParameter(format!(
                "half_extent must be > 0, got {}",
                self.half_extent
            )));
        }
        if self.points_per_axis < 3 || self.points_per_axis % 2 == 0 {
            return Err(FieldError::InvalidParameter(format!(
                "points_per_axis must be odd and >= 3, got {}",
                self.points_per_axis
            )));
        }
        Ok(())
    }

    /// Axis coordinates; the middle node is exactly zero.
    pub fn axis(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        let half = (n / 2) as f64;
        (0..n)
            .map(|i| {
                let k = i as f64 - half;
                self.half_extent * k / half
            })
            .collect()
    }

    pub fn center_index(&self) -> usize {
        self.points_per_axis / 2
    }
}

/// Evaluates `f(x₁, y₁)` on the grid; row index follows `y₁`, column index
/// `x₁`, both ascending. Rows are computed in parallel.
pub fn evaluate_on_grid<T, F>(grid: &GridSpec, f: F) -> Vec<Vec<T>>
where
    T: Send,
    F: Fn(f64, f64) -> T + Sync,
{
    let axis = grid.axis();
    axis.par_iter()
        .map(|&y| axis.iter().map(|&x| f(x, y)).collect())
        .collect()
}
