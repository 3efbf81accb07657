//! Far-field amplitudes by direct quadrature of the transmission function.
//!
//! `E(u) = ∫₀¹ T(x)·e^(−i2πux) dx` with `T(x) = e^(iLχ(x))` and `x` in units
//! of the grating period. The susceptibility is split as
//! `χ(x) = χ_base + m(x)`, so that
//!
//! `E(u) = e^(iLχ_base)·[∫₀¹ e^(−i2πux) dx + ∫₀¹ (e^(iLm(x)) − 1)·e^(−i2πux) dx]`.
//!
//! The first integral is done exactly and the second by composite
//! Gauss-Legendre; computing `e^(iLm) − 1` directly keeps small diffraction
//! orders accurate when the modulation is weak.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use super::{check_exponent, DiffractionConfig, DiffractionError};
use crate::atomic::{chi_full, chi_full_modulation, AtomParams, ChiExpansion, DriveConfig, SignConvention};
use crate::fields::{sw_amplitude, StandingWave};

/// Nodes per panel.
pub const NODES_PER_PANEL: usize = 64;
/// Panels of the base rule; the convergence check doubles this.
pub const BASE_PANELS: usize = 8;
/// Relative change allowed between the base and doubled rule.
pub const CONVERGENCE_RTOL: f64 = 1e-8;
/// Absolute floor of the convergence check, relative to the integrand scale.
pub const CONVERGENCE_FLOOR: f64 = 1e-14;
/// Upper bound on panels for the adaptive variant.
pub const MAX_PANELS: usize = 4096;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let degree = NonZeroUsize::new(NODES_PER_PANEL).expect("nonzero degree");
        GaussLegendre::new(degree).as_node_weight_pairs().to_vec()
    })
}

/// Susceptibility across one grating period.
pub trait SusceptibilityProfile: Sync {
    /// Reference value, normally `χ` where the standing wave has its node.
    fn base(&self) -> Complex64;
    /// `χ(x) − base()`.
    fn modulation(&self, x: f64) -> Result<Complex64, DiffractionError>;
}

/// `χ(x) = χ⁽¹⁾ + Ωc²(x)·χ⁽³⁾`.
#[derive(Debug, Clone, Copy)]
pub struct ExpandedProfile {
    pub chi: ChiExpansion,
    pub sw: StandingWave,
}

impl SusceptibilityProfile for ExpandedProfile {
    fn base(&self) -> Complex64 {
        self.chi.chi1
    }

    fn modulation(&self, x: f64) -> Result<Complex64, DiffractionError> {
        let oc = sw_amplitude(&self.sw, x);
        Ok(self.chi.chi3 * (oc * oc))
    }
}

/// Unexpanded susceptibility with `Ωc = Ωc(x)` at every point.
#[derive(Debug, Clone, Copy)]
pub struct FullProfile {
    atom: AtomParams,
    drive: DriveConfig,
    sw: StandingWave,
    sign: SignConvention,
    base: Complex64,
}

impl FullProfile {
    /// `drive.omega_c` is ignored; the standing wave supplies it.
    pub fn new(
        atom: AtomParams,
        drive: DriveConfig,
        sw: StandingWave,
        sign: SignConvention,
    ) -> Result<Self, DiffractionError> {
        let at_node = DriveConfig { omega_c: 0.0, ..drive };
        let base = chi_full(&atom, &at_node, sign)?;
        Ok(Self { atom, drive: at_node, sw, sign, base })
    }
}

impl SusceptibilityProfile for FullProfile {
    fn base(&self) -> Complex64 {
        self.base
    }

    fn modulation(&self, x: f64) -> Result<Complex64, DiffractionError> {
        let drive = DriveConfig { omega_c: sw_amplitude(&self.sw, x).abs(), ..self.drive };
        let m = chi_full_modulation(&self.atom, &drive)?;
        Ok(match self.sign {
            SignConvention::Physical => m,
            SignConvention::AsPrinted => -m,
        })
    }
}

/// Arbitrary `χ(x)`; the base is `χ(0)`.
pub struct FnProfile<F> {
    f: F,
    base: Complex64,
}

impl<F: Fn(f64) -> Complex64 + Sync> FnProfile<F> {
    pub fn new(f: F) -> Self {
        let base = f(0.0);
        Self { f, base }
    }
}

impl<F: Fn(f64) -> Complex64 + Sync> SusceptibilityProfile for FnProfile<F> {
    fn base(&self) -> Complex64 {
        self.base
    }

    fn modulation(&self, x: f64) -> Result<Complex64, DiffractionError> {
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(DiffractionError::InvalidConfig(format!("non-finite susceptibility at x = {x}")));
        }
        Ok(v - self.base)
    }
}

/// `e^w − 1` without cancellation for small `w`.
pub(crate) fn expm1(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * w.im.cos() - 2.0 * half * half, w.re.exp() * w.im.sin())
}

/// `∫₀¹ e^(−i2πux) dx`, exactly zero at nonzero integers.
fn plane_wave_integral(u: f64) -> Complex64 {
    if u == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if u.fract() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        let w = -2.0 * PI * u;
        expm1(I * w) / (I * w)
    }
}

/// Fourier integrals at the spatial frequencies `freqs` with a fixed number
/// of panels. Returns the values and the integrand scale used by the
/// convergence floor.
fn fourier_integrals<P: SusceptibilityProfile + ?Sized>(
    profile: &P,
    length: f64,
    freqs: &[f64],
    panels: usize,
) -> Result<(Vec<Complex64>, f64), DiffractionError> {
    let base = profile.base();
    let prefactor_exp = I * length * base;
    check_exponent(prefactor_exp.re)?;
    let prefactor = prefactor_exp.exp();

    let rule = legendre_rule();
    let width = 1.0 / panels as f64;
    let mut sums = vec![Complex64::new(0.0, 0.0); freqs.len()];
    let mut scale = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for &(node, weight) in rule {
            let x = mid + 0.5 * width * node;
            let w = 0.5 * width * weight;
            let m = profile.modulation(x)?;
            let exponent = I * length * m;
            check_exponent(prefactor_exp.re + exponent.re)?;
            let g = expm1(exponent) * w;
            scale += g.norm();
            for (sum, &u) in sums.iter_mut().zip(freqs) {
                *sum += g * Complex64::from_polar(1.0, -2.0 * PI * u * x);
            }
        }
    }
    let values = sums
        .into_iter()
        .zip(freqs)
        .map(|(s, &u)| prefactor * (plane_wave_integral(u) + s))
        .collect();
    Ok((values, prefactor.norm() * (1.0 + scale)))
}

fn converged(coarse: &[Complex64], fine: &[Complex64], scale: f64) -> Option<f64> {
    let worst = coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| (c - f).norm() / (f.norm() + CONVERGENCE_FLOOR * scale / CONVERGENCE_RTOL))
        .fold(0.0, f64::max);
    (worst <= CONVERGENCE_RTOL).then_some(worst)
}

/// Fourier amplitudes at several frequencies, doubling the panel count from
/// `start_panels` until two successive rules agree or `max_panels` is hit.
pub fn fourier_amplitudes<P: SusceptibilityProfile + ?Sized>(
    profile: &P,
    length: f64,
    freqs: &[f64],
    start_panels: usize,
    max_panels: usize,
) -> Result<Vec<Complex64>, DiffractionError> {
    let mut panels = start_panels.max(1);
    let (mut coarse, _) = fourier_integrals(profile, length, freqs, panels)?;
    loop {
        let (fine, scale) = fourier_integrals(profile, length, freqs, 2 * panels)?;
        if converged(&coarse, &fine, scale).is_some() {
            return Ok(fine);
        }
        panels *= 2;
        if 2 * panels > max_panels {
            let difference = coarse
                .iter()
                .zip(&fine)
                .map(|(c, f)| (c - f).norm() / f.norm().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            return Err(DiffractionError::QuadratureNonConvergent { difference, panels });
        }
        coarse = fine;
    }
}

/// Amplitude of diffraction order `n` by quadrature: 64-node Gauss-Legendre
/// on 8 panels, checked against 16 panels.
pub fn order_amplitude_quadrature<P: SusceptibilityProfile + ?Sized>(
    profile: &P,
    cfg: &DiffractionConfig,
    n: i32,
) -> Result<Complex64, DiffractionError> {
    let out = fourier_amplitudes(profile, cfg.length_over_xi, &[n as f64], BASE_PANELS, 2 * BASE_PANELS)?;
    Ok(out[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(length: f64) -> DiffractionConfig {
        DiffractionConfig { length_over_xi: length, ..Default::default() }
    }

    #[test]
    fn transparent_grating_is_orthogonal() {
        let p = FnProfile::new(|_| Complex64::new(0.0, 0.0));
        assert_eq!(order_amplitude_quadrature(&p, &cfg(50.0), 0).unwrap(), Complex64::new(1.0, 0.0));
        for n in [-2, -1, 1, 2, 3] {
            assert_eq!(order_amplitude_quadrature(&p, &cfg(50.0), n).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn constant_susceptibility_factors_out() {
        let c = Complex64::new(0.3, 0.02);
        let p = FnProfile::new(move |_| c);
        let e0 = order_amplitude_quadrature(&p, &cfg(10.0), 0).unwrap();
        assert!((e0 - (I * c * 10.0).exp()).norm() < 1e-15);
        assert_eq!(order_amplitude_quadrature(&p, &cfg(10.0), 2).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn non_integer_frequency_integral() {
        // ∫ e^{-i2πux} over [0,1] at u = 1/2 is 1/(iπ)·2 = -2i/π.
        let v = plane_wave_integral(0.5);
        assert!((v - Complex64::new(0.0, -2.0 / PI)).norm() < 1e-15);
    }

    #[test]
    fn complex_expm1_small_and_large() {
        let w = Complex64::new(1e-10, -2e-10);
        assert!((expm1(w) - w).norm() < 1e-19);
        let w = Complex64::new(0.7, 2.1);
        assert!((expm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn gain_overflow_is_reported() {
        let p = FnProfile::new(|_| Complex64::new(0.0, -20.0));
        let err = order_amplitude_quadrature(&p, &cfg(50.0), 0).unwrap_err();
        assert!(matches!(err, DiffractionError::Overflow { .. }));
    }

    #[test]
    fn sharp_profile_fails_fixed_rule_but_adaptive_converges() {
        // Phase excursion of 10⁵ rad across the period.
        let p = FnProfile::new(|x: f64| Complex64::new(2000.0, 0.0) * (PI * x).sin().powi(2));
        let c = cfg(50.0);
        assert!(matches!(
            order_amplitude_quadrature(&p, &c, 1),
            Err(DiffractionError::QuadratureNonConvergent { .. })
        ));
        let v = fourier_amplitudes(&p, 50.0, &[1.0], BASE_PANELS, MAX_PANELS).unwrap();
        assert!(v[0].is_finite());
    }
}
