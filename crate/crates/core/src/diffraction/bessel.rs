//! Bessel functions of the first kind, integer order, complex argument.

use num_complex::Complex64;

use super::DiffractionError;

/// Largest `|z|` accepted by the power series.
pub const SERIES_GUARD: f64 = 40.0;
/// Above this `|z|` the power series loses digits to cancellation
/// (relative error grows like `10⁻¹⁶·e^(|z| − |Im z|)`) and the backward
/// recurrence is used instead.
pub const SERIES_SWITCH: f64 = 12.0;
/// Above this `|z|` the asymptotic expansion replaces the recurrence.
pub const ASYMPTOTIC_SWITCH: f64 = 2000.0;
/// Largest `|z|` accepted by [`j_orders_scaled`]; the phase `ω = z − …`
/// keeps about `10⁻¹⁶·|z|` absolute accuracy.
pub const EXTENDED_GUARD: f64 = 1e8;

const SERIES_RTOL: f64 = 1e-16;
const SERIES_FLOOR: f64 = 1e-30;
const MAX_SERIES_TERMS: usize = 500;

/// `Jₙ(z)` for `|z| ≤ SERIES_GUARD`.
///
/// Up to [`SERIES_SWITCH`] this is the ascending power series
/// `Σₖ (−1)ᵏ (z/2)^(n+2k) / (k!(n+k)!)`, summed until the next term is below
/// `10⁻¹⁶·(|partial sum| + 10⁻³⁰)`; beyond it, Miller's backward recurrence.
/// Negative orders use `J₋ₙ = (−1)ⁿ Jₙ`.
pub fn bessel_j_complex(n: i32, z: Complex64) -> Result<Complex64, DiffractionError> {
    if !z.is_finite() || z.norm() > SERIES_GUARD {
        return Err(DiffractionError::ArgumentTooLarge { modulus: z.norm(), guard: SERIES_GUARD });
    }
    let m = n.unsigned_abs();
    let value = if z.norm() <= SERIES_SWITCH {
        series(m, z)
    } else {
        miller_scaled(m as usize, z)[m as usize] * z.im.abs().exp()
    };
    Ok(if n < 0 && m % 2 == 1 { -value } else { value })
}

fn series(n: u32, z: Complex64) -> Complex64 {
    let half = z * 0.5;
    // (z/2)^n / n!
    let mut term = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        term *= half / j as f64;
    }
    let step = -(half * half);
    let mut sum = term;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= step / ((kf + 1.0) * (n as f64 + kf + 1.0));
        if term.norm() < SERIES_RTOL * (sum.norm() + SERIES_FLOOR) {
            break;
        }
        sum += term;
    }
    sum
}

/// `e^(−|Im z|)·Jₖ(z)` for `k = 0..=n_max`.
///
/// Up to [`SERIES_SWITCH`] this is the power series and beyond
/// [`ASYMPTOTIC_SWITCH`] Hankel's expansion. In between it is Miller's
/// backward recurrence normalised with `e^(±iz) = J₀ + 2Σₖ (±i)ᵏ Jₖ`, the
/// sign chosen so that the identity has magnitude `e^|Im z|` and the sum
/// does not cancel. The scaling keeps every entry finite.
pub fn j_orders_scaled(n_max: usize, z: Complex64) -> Result<Vec<Complex64>, DiffractionError> {
    if !z.is_finite() || z.norm() > EXTENDED_GUARD {
        return Err(DiffractionError::ArgumentTooLarge { modulus: z.norm(), guard: EXTENDED_GUARD });
    }
    if z == Complex64::new(0.0, 0.0) {
        let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    if z.norm() <= SERIES_SWITCH {
        let scale = (-z.im.abs()).exp();
        return Ok((0..=n_max as u32).map(|k| series(k, z) * scale).collect());
    }
    if z.norm() > ASYMPTOTIC_SWITCH {
        return Ok((0..=n_max).map(|k| hankel_scaled(k, z)).collect());
    }
    Ok(miller_scaled(n_max, z))
}

fn miller_scaled(n_max: usize, z: Complex64) -> Vec<Complex64> {
    // Complex division squares the modulus, so stay well below 1e154.
    const RESCALE_ABOVE: f64 = 1e100;
    let modulus = z.norm();
    let mut start = (modulus + 30.0 + 12.0 * modulus.cbrt()).ceil() as usize;
    start = start.max(n_max + 30);
    start += start % 2;

    // Normalise with e^{iz} when Im z <= 0 and e^{-iz} otherwise.
    let unit = if z.im <= 0.0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
    let unit_pow = |k: usize| match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => unit,
        2 => Complex64::new(-1.0, 0.0),
        _ => -unit,
    };

    let mut low = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut upper = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1e-30, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in (1..=start).rev() {
        if k <= n_max {
            low[k] = cur;
        }
        sum += 2.0 * unit_pow(k) * cur;
        let prev = cur * (2.0 * k as f64) / z - upper;
        upper = cur;
        cur = prev;
        if cur.norm() > RESCALE_ABOVE {
            cur /= RESCALE_ABOVE;
            upper /= RESCALE_ABOVE;
            sum /= RESCALE_ABOVE;
            for v in low.iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    low[0] = cur;
    sum += cur;

    let phase = Complex64::from_polar(1.0, if z.im <= 0.0 { z.re } else { -z.re });
    let size = sum.norm();
    let norm = phase / (sum / size) / size;
    low.iter().map(|v| v * norm).collect()
}

/// Hankel's asymptotic expansion, scaled by `e^(−|Im z|)`:
/// `Jₙ(z) ≈ √(2/πz)·(P cos ω − Q sin ω)`, `ω = z − nπ/2 − π/4`.
fn hankel_scaled(n: usize, z: Complex64) -> Complex64 {
    // J_n(-z) = (-1)^n J_n(z) keeps arg z within [-π/2, π/2].
    let (w, sign) = if z.re < 0.0 { (-z, if n % 2 == 1 { -1.0 } else { 1.0 }) } else { (z, 1.0) };
    let mu = 4.0 * (n as f64) * (n as f64);
    let inv = 1.0 / (8.0 * w);
    let mut p = Complex64::new(0.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..60 {
        let size = term.norm();
        if size > last || size < 1e-17 {
            break;
        }
        last = size;
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        let odd = (2 * k + 1) as f64;
        term *= (mu - odd * odd) * inv / (k + 1) as f64;
    }
    let omega = w - (n as f64 * 0.5 + 0.25) * std::f64::consts::PI;
    let i = Complex64::new(0.0, 1.0);
    let damp = w.im.abs();
    let plus = (i * omega - damp).exp();
    let minus = (-i * omega - damp).exp();
    let cos = (plus + minus) * 0.5;
    let sin = (plus - minus) / (2.0 * i);
    sign * (2.0 / (std::f64::consts::PI * w)).sqrt() * (p * cos - q * sin)
}
