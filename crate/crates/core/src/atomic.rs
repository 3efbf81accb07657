//! Probe susceptibility of the four-level N-type system.
//!
//! Levels |1⟩ and |2⟩ are ground states, |3⟩ and |4⟩ excited states. The
//! probe drives |1⟩↔|3⟩, the composite vortex drives |2⟩↔|3⟩ and the
//! standing-wave coupling field drives |2⟩↔|4⟩. All rates, detunings and
//! Rabi frequencies are expressed in units of the excited-state decay rate γ,
//! and the susceptibility is dimensionless (the density/dipole prefactor is
//! absorbed into the propagation length unit).
//!
//! Three routes to the same number are provided:
//!
//! * [`chi_full`], the closed-form ratio of polynomials in the denominators
//!   `A₂`, `A₃`, `A₄`;
//! * [`steady_state_chi`], a direct 3×3 linear solve of the amplitude
//!   equations with `a₁ = 1`;
//! * [`time_evolve`], fixed-step RK4 integration of the amplitude equations.
//!
//! [`chi_expansion`] gives the linear and cross-Kerr coefficients of the
//! expansion in powers of `Ωc²`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Denominators smaller than this are treated as exact poles.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Probe amplitudes above this (in units of γ) leave the weak-probe regime.
pub const WEAK_PROBE_LIMIT: f64 = 0.1;

/// Largest RK4 step accepted by [`time_evolve`], in units of 1/γ.
pub const MAX_TIME_STEP: f64 = 1e-2;

/// Ground-state decoherence used when none is given.
pub const DEFAULT_GAMMA2: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtomicError {
    #[error("singular susceptibility denominator (|D| = {magnitude:e}); exact dark-resonance pole")]
    SingularDenominator { magnitude: f64 },
    #[error("steady-state linear system is singular (smallest pivot {pivot:e})")]
    SingularSystem { pivot: f64 },
    #[error("time step {dt} exceeds the maximum of {max} / gamma")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Decay rates of the atom, in units of γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Decay rate of |3⟩.
    pub gamma3: f64,
    /// Decay rate of |4⟩.
    pub gamma4: f64,
    /// Ground-state decoherence of |2⟩.
    pub gamma2: f64,
}

impl Default for AtomParams {
    fn default() -> Self {
        Self { gamma3: 1.0, gamma4: 1.0, gamma2: DEFAULT_GAMMA2 }
    }
}

impl AtomParams {
    pub fn new(gamma3: f64, gamma4: f64, gamma2: f64) -> Result<Self, AtomicError> {
        let atom = Self { gamma3, gamma4, gamma2 };
        atom.validate()?;
        Ok(atom)
    }

    /// Checks `gamma3 > 0`, `gamma4 > 0` and `gamma2 ≥ 0`.
    pub fn validate(&self) -> Result<(), AtomicError> {
        if !(self.gamma3 > 0.0 && self.gamma3.is_finite()) {
            return Err(AtomicError::InvalidParameter(format!("gamma3 must be > 0, got {}", self.gamma3)));
        }
        if !(self.gamma4 > 0.0 && self.gamma4.is_finite()) {
            return Err(AtomicError::InvalidParameter(format!("gamma4 must be > 0, got {}", self.gamma4)));
        }
        if !(self.gamma2 >= 0.0 && self.gamma2.is_finite()) {
            return Err(AtomicError::InvalidParameter(format!("gamma2 must be >= 0, got {}", self.gamma2)));
        }
        Ok(())
    }
}

/// How the vortex field enters the |2⟩↔|3⟩ coupling.
///
/// `Hermitian` couples |2⟩ to |3⟩ through `Ω_LG*`, so the susceptibility sees
/// `|Ω_LG|²`. `Analytic` uses `Ω_LG` in both equations, giving `Ω_LG²`. The two
/// coincide whenever `Ω_LG` is real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VortexSquare {
    #[default]
    Hermitian,
    Analytic,
}

/// Overall sign of the closed-form susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// Matches the steady state of the amplitude equations: resonant
    /// absorption has `Im χ > 0`.
    #[default]
    Physical,
    /// The opposite overall sign.
    AsPrinted,
}

/// Which pair of expansion coefficients to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientSource {
    /// Exact zeroth and first Taylor coefficients in `Ωc²` of the physical
    /// susceptibility.
    #[default]
    Rederived,
    /// `χ⁽¹⁾ = −A₃/D`, `χ⁽³⁾ = −Ω_LG²/(A₄|D|²)`; kept for comparison only.
    AsPrinted,
}

/// Detunings and field amplitudes at a single point of the medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    pub delta_p: f64,
    pub delta_c: f64,
    pub delta_lg: f64,
    pub omega_p: f64,
    /// Local standing-wave amplitude, `≥ 0`.
    pub omega_c: f64,
    /// Local vortex amplitude.
    pub omega_lg: Complex64,
    pub vortex_square: VortexSquare,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            delta_p: 0.0,
            delta_c: 0.0,
            delta_lg: 0.0,
            omega_p: 1e-3,
            omega_c: 0.0,
            omega_lg: Complex64::new(0.0, 0.0),
            vortex_square: VortexSquare::Hermitian,
        }
    }
}

impl DriveConfig {
    pub fn with_fields(mut self, omega_c: f64, omega_lg: Complex64) -> Self {
        self.omega_c = omega_c;
        self.omega_lg = omega_lg;
        self
    }

    /// Coefficient multiplying `a₃` in the `a₂` equation.
    fn lg_back_coupling(&self) -> Complex64 {
        match self.vortex_square {
            VortexSquare::Hermitian => self.omega_lg.conj(),
            VortexSquare::Analytic => self.omega_lg,
        }
    }

    /// `|Ω_LG|²` or `Ω_LG²` depending on the convention.
    pub fn lg_square(&self) -> Complex64 {
        self.omega_lg * self.lg_back_coupling()
    }

    /// Returns a message when the probe is too strong for `|a₁|² ≈ 1`.
    pub fn weak_probe_warning(&self, atom: &AtomParams) -> Option<String> {
        let limit = WEAK_PROBE_LIMIT * atom.gamma3.min(atom.gamma4);
        (self.omega_p.abs() > limit).then(|| {
            format!(
                "probe amplitude {} exceeds the weak-probe limit {} (units of gamma)",
                self.omega_p, limit
            )
        })
    }

    fn validate(&self) -> Result<(), AtomicError> {
        if !(self.omega_c >= 0.0 && self.omega_c.is_finite()) {
            return Err(AtomicError::InvalidParameter(format!("omega_c must be >= 0, got {}", self.omega_c)));
        }
        let all_finite = [self.delta_p, self.delta_c, self.delta_lg, self.omega_p]
            .iter()
            .all(|v| v.is_finite())
            && self.omega_lg.is_finite();
        if !all_finite {
            return Err(AtomicError::InvalidParameter("non-finite detuning or field".into()));
        }
        Ok(())
    }
}

/// `A₂`, `A₃`, `A₄` in units of γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Denominators {
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
}

/// Linear and cross-Kerr susceptibility at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiExpansion {
    pub chi1: Complex64,
    pub chi3: Complex64,
}

impl ChiExpansion {
    /// `χ⁽¹⁾ + Ωc²·χ⁽³⁾`.
    pub fn evaluate(&self, omega_c: f64) -> Complex64 {
        self.chi1 + self.chi3 * (omega_c * omega_c)
    }
}

/// Probability amplitudes `a₁ … a₄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub a: [Complex64; 4],
}

impl AmplitudeState {
    pub fn ground() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self { a: [Complex64::new(1.0, 0.0), zero, zero, zero] }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().map(|c| c.norm_sqr()).sum()
    }

    fn axpy(&self, h: f64, k: &[Complex64; 4]) -> Self {
        let mut a = self.a;
        for (ai, ki) in a.iter_mut().zip(k) {
            *ai += ki * h;
        }
        Self { a }
    }
}

pub fn denominators(atom: &AtomParams, drive: &DriveConfig) -> Denominators {
    let two_photon = drive.delta_p - drive.delta_lg;
    Denominators {
        a2: Complex64::new(two_photon, atom.gamma2),
        a3: Complex64::new(drive.delta_p, 0.5 * atom.gamma3),
        a4: Complex64::new(two_photon + drive.delta_c, 0.5 * atom.gamma4),
    }
}

/// Closed-form probe susceptibility.
///
/// `Physical` gives `−(A₂A₄ − Ωc²) / (A₄(A₂A₃ − Ω_LG²) − A₃Ωc²)`, `AsPrinted`
/// its negation.
pub fn chi_full(
    atom: &AtomParams,
    drive: &DriveConfig,
    sign: SignConvention,
) -> Result<Complex64, AtomicError> {
    atom.validate()?;
    drive.validate()?;
    let d = denominators(atom, drive);
    let oc2 = drive.omega_c * drive.omega_c;
    let dark = d.a2 * d.a3 - drive.lg_square();
    let denominator = d.a4 * dark - d.a3 * oc2;
    if denominator.norm() <= POLE_TOLERANCE {
        return Err(AtomicError::SingularDenominator { magnitude: denominator.norm() });
    }
    let printed = (d.a2 * d.a4 - oc2) / denominator;
    Ok(match sign {
        SignConvention::Physical => -printed,
        SignConvention::AsPrinted => printed,
    })
}

/// `chi_full(Physical)` minus its `Ωc = 0` value, computed without
/// subtractive cancellation: `−Ωc²·G / (D·(A₄D − A₃Ωc²))` with
/// `D = A₂A₃ − G`.
pub fn chi_full_modulation(atom: &AtomParams, drive: &DriveConfig) -> Result<Complex64, AtomicError> {
    let d = denominators(atom, drive);
    let oc2 = drive.omega_c * drive.omega_c;
    let g = drive.lg_square();
    let dark = d.a2 * d.a3 - g;
    let denominator = d.a4 * dark - d.a3 * oc2;
    if dark.norm() <= POLE_TOLERANCE || denominator.norm() <= POLE_TOLERANCE {
        return Err(AtomicError::SingularDenominator { magnitude: dark.norm().min(denominator.norm()) });
    }
    Ok(-(g * oc2) / (dark * denominator))
}

/// Expansion `χ ≈ χ⁽¹⁾ + Ωc²·χ⁽³⁾`.
///
/// The coefficients do not depend on `drive.omega_c`.
pub fn chi_expansion(
    atom: &AtomParams,
    drive: &DriveConfig,
    source: CoefficientSource,
) -> Result<ChiExpansion, AtomicError> {
    atom.validate()?;
    drive.validate()?;
    let d = denominators(atom, drive);
    let g = drive.lg_square();
    let dark = d.a2 * d.a3 - g;
    if dark.norm() <= POLE_TOLERANCE {
        return Err(AtomicError::SingularDenominator { magnitude: dark.norm() });
    }
    // g == 0 must give an exact zero, not -0/x rounding noise.
    let kerr = |den: Complex64| if g == Complex64::new(0.0, 0.0) { g } else { -g / den };
    Ok(match source {
        CoefficientSource::Rederived => ChiExpansion {
            chi1: -d.a2 / dark,
            chi3: kerr(d.a4 * dark * dark),
        },
        CoefficientSource::AsPrinted => ChiExpansion {
            chi1: -d.a3 / dark,
            chi3: kerr(d.a4 * dark.norm_sqr()),
        },
    })
}

/// Susceptibility from the fixed point of the amplitude equations with
/// `a₁ = 1`: solves for `(a₂, a₃, a₄)` and returns `a₃/Ωp`.
///
/// The system is linear in `Ωp`, so it is solved for unit probe and the
/// result does not depend on `drive.omega_p`.
pub fn steady_state_chi(atom: &AtomParams, drive: &DriveConfig) -> Result<Complex64, AtomicError> {
    drive.validate()?;
    let d = denominators(atom, drive);
    let oc = Complex64::new(drive.omega_c, 0.0);
    let lg = drive.omega_lg;
    let back = drive.lg_back_coupling();
    let zero = Complex64::new(0.0, 0.0);
    // Rows are the a2, a3, a4 equations with d/dt = 0, each multiplied by -i.
    let m = Matrix3::new(
        d.a2, back, oc, //
        lg, d.a3, zero, //
        oc, zero, d.a4,
    );
    let rhs = Vector3::new(zero, Complex64::new(-1.0, 0.0), zero);
    let lu = m.lu();
    let u = lu.u();
    let pivot = (0..3).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if pivot <= POLE_TOLERANCE {
        return Err(AtomicError::SingularSystem { pivot });
    }
    let sol = lu.solve(&rhs).ok_or(AtomicError::SingularSystem { pivot })?;
    Ok(sol[1])
}

fn amplitude_rhs(atom: &AtomParams, drive: &DriveConfig, s: &AmplitudeState) -> [Complex64; 4] {
    let [a1, a2, a3, a4] = s.a;
    let op = drive.omega_p;
    let oc = drive.omega_c;
    let lg = drive.omega_lg;
    let back = drive.lg_back_coupling();
    let two_photon = drive.delta_p - drive.delta_lg;
    [
        I * op * a3,
        I * (two_photon * a2 + back * a3 + oc * a4) - atom.gamma2 * a2,
        I * (op * a1 + lg * a2 + drive.delta_p * a3) - 0.5 * atom.gamma3 * a3,
        I * (oc * a2 + (two_photon + drive.delta_c) * a4) - 0.5 * atom.gamma4 * a4,
    ]
}

/// Integrates the amplitude equations with classical RK4.
///
/// The interval is split into `ceil(t_final/dt)` equal steps, so the step
/// actually taken never exceeds `dt`. Decay rates may be zero here.
pub fn time_evolve(
    atom: &AtomParams,
    drive: &DriveConfig,
    initial: AmplitudeState,
    t_final: f64,
    dt: f64,
) -> Result<AmplitudeState, AtomicError> {
    if !(dt > 0.0 && dt <= MAX_TIME_STEP) {
        return Err(AtomicError::StepTooLarge { dt, max: MAX_TIME_STEP });
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(AtomicError::InvalidParameter(format!("t_final must be >= 0, got {t_final}")));
    }
    if [atom.gamma2, atom.gamma3, atom.gamma4].iter().any(|g| !(*g >= 0.0)) {
        return Err(AtomicError::InvalidParameter("decay rates must be >= 0".into()));
    }
    drive.validate()?;

    let steps = (t_final / dt).ceil() as usize;
    if steps == 0 {
        return Ok(initial);
    }
    let h = t_final / steps as f64;
    let f = |s: &AmplitudeState| amplitude_rhs(atom, drive, s);
    let rk4 = |s: &AmplitudeState| {
        let k1 = f(s);
        let k2 = f(&s.axpy(0.5 * h, &k1));
        let k3 = f(&s.axpy(0.5 * h, &k2));
        let k4 = f(&s.axpy(h, &k3));
        let mut out = *s;
        for i in 0..4 {
            out.a[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
        out
    };
    // The equations are linear with constant coefficients, so one RK4 step
    // is a fixed matrix; its columns are the steps of the unit vectors.
    let mut step = [[Complex64::new(0.0, 0.0); 4]; 4];
    for j in 0..4 {
        let mut unit = AmplitudeState { a: [Complex64::new(0.0, 0.0); 4] };
        unit.a[j] = Complex64::new(1.0, 0.0);
        let column = rk4(&unit);
        for i in 0..4 {
            step[i][j] = column.a[i];
        }
    }
    let mut s = initial;
    for _ in 0..steps {
        let a = s.a;
        for (out, row) in s.a.iter_mut().zip(&step) {
            *out = row[0] * a[0] + row[1] * a[1] + row[2] * a[2] + row[3] * a[3];
        }
    }
    Ok(s)
}
