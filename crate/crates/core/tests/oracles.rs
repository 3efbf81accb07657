//! Independent numerical checks of the physics layer.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eig_sim::atomic::{
    chi_expansion, chi_full, denominators, time_evolve, AmplitudeState, AtomParams, ChiExpansion, CoefficientSource,
    DriveConfig, SignConvention, VortexSquare,
};
use eig_sim::diffraction::quadrature::{fourier_amplitudes, BASE_PANELS, MAX_PANELS};
use eig_sim::diffraction::{
    bessel_argument, full_angular_pattern, order_amplitude_closed_form, slit_envelope, DiffractionConfig,
    DiffractionError, ExpandedProfile,
};
use eig_sim::fields::StandingWave;

fn drive(delta_c: f64, delta_lg: f64, omega_lg: Complex64) -> DriveConfig {
    DriveConfig { delta_c, delta_lg, ..Default::default() }.with_fields(0.0, omega_lg)
}

/// Largest deviation between closed form and quadrature over orders −3..3,
/// relative to the largest amplitude.
fn closed_vs_quadrature(chi: &ChiExpansion, omega_c0: f64, length: f64) -> f64 {
    let cfg = DiffractionConfig { length_over_xi: length, ..Default::default() };
    let orders: Vec<i32> = (-3..=3).collect();
    let freqs: Vec<f64> = orders.iter().map(|&n| n as f64).collect();
    let profile = ExpandedProfile { chi: *chi, sw: StandingWave::new(omega_c0) };
    let quad = fourier_amplitudes(&profile, length, &freqs, BASE_PANELS, MAX_PANELS).unwrap();
    let largest = quad.iter().map(|q| q.norm()).fold(0.0, f64::max);
    orders
        .iter()
        .zip(&quad)
        .map(|(&n, q)| (order_amplitude_closed_form(chi, omega_c0, &cfg, n).unwrap() - q).norm() / largest)
        .fold(0.0, f64::max)
}

#[test]
fn closed_form_matches_quadrature_at_figure_points() {
    let atom = AtomParams::default();
    let cases = [
        // dark-spot and lobe settings
        (drive(0.0, 0.0, Complex64::new(1.5, 0.0)), 0.2),
        (drive(0.0, 0.0, Complex64::from_polar(0.8, 1.1)), 0.2),
        // five-fold pattern setting
        (drive(-1.0, 2.0, Complex64::new(1.1, 0.0)), 0.5),
        (drive(-1.0, 2.0, Complex64::from_polar(0.4, -2.0)), 0.5),
    ];
    for (d, omega_c0) in cases {
        let chi = chi_expansion(&atom, &d, CoefficientSource::Rederived).unwrap();
        for length in [1.0, 10.0, 50.0] {
            let dev = closed_vs_quadrature(&chi, omega_c0, length);
            assert!(dev < 1e-10, "{d:?} L = {length}: {dev:e}");
        }
    }
}

#[test]
fn negative_orders_mirror_positive_ones() {
    let atom = AtomParams::default();
    let chi = chi_expansion(&atom, &drive(-1.0, 2.0, Complex64::new(1.1, 0.0)), CoefficientSource::Rederived).unwrap();
    let cfg = DiffractionConfig::default();
    let profile = ExpandedProfile { chi, sw: StandingWave::new(0.5) };
    let quad = fourier_amplitudes(&profile, cfg.length_over_xi, &[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0], BASE_PANELS, MAX_PANELS)
        .unwrap();
    for n in 1..=3 {
        let plus = order_amplitude_closed_form(&chi, 0.5, &cfg, n).unwrap();
        let minus = order_amplitude_closed_form(&chi, 0.5, &cfg, -n).unwrap();
        assert!((plus - minus).norm() <= 1e-15 * plus.norm(), "order {n}");
        let (qm, qp) = (quad[(3 - n) as usize], quad[(2 + n) as usize]);
        assert!((qm - qp).norm() <= 1e-10 * qp.norm().max(1e-300), "order {n}: {qm} vs {qp}");
    }
}

/// `Σ|Eₙ|²` over `|n| ≤ 40` next to the mean of `|T(x)|²` by the periodic
/// trapezoid rule.
fn power_balance(chi: &ChiExpansion, omega_c0: f64, length: f64) -> (f64, f64) {
    let cfg = DiffractionConfig { length_over_xi: length, ..Default::default() };
    let sum: f64 = (-40..=40).map(|n| order_amplitude_closed_form(chi, omega_c0, &cfg, n).unwrap().norm_sqr()).sum();
    let nodes = 512;
    let mean = (0..nodes)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / nodes as f64).sin() * omega_c0;
            (-2.0 * length * chi.evaluate(s).im).exp()
        })
        .sum::<f64>()
        / nodes as f64;
    (sum, mean)
}

#[test]
fn order_power_matches_transmitted_power() {
    let atom = AtomParams::default();
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut absorbing = 0;
    let mut tried = 0;
    while absorbing < 30 {
        tried += 1;
        assert!(tried < 10_000, "too few usable samples");
        let d = DriveConfig {
            delta_p: r.gen_range(-3.0..=3.0),
            delta_c: r.gen_range(-3.0..=3.0),
            delta_lg: r.gen_range(-3.0..=3.0),
            ..Default::default()
        }
        .with_fields(0.0, Complex64::new(r.gen_range(0.0..=1.5), 0.0));
        let omega_c0 = r.gen_range(0.0..=0.5);
        let length = r.gen_range(0.1..=5.0);
        let chi = chi_expansion(&atom, &d, CoefficientSource::Rederived).unwrap();
        let edges = [chi.chi1.im, chi.evaluate(omega_c0).im];
        if bessel_argument(&chi, omega_c0, length).norm() > 10.0 || edges.iter().any(|im| im * length < -20.0) {
            continue;
        }
        let (sum, mean) = power_balance(&chi, omega_c0, length);
        assert!((sum - mean).abs() <= 1e-10 * mean, "{d:?}: {sum} vs {mean}");
        if edges.iter().all(|im| *im > 0.0) {
            assert!(sum < 1.0, "absorbing medium gained power: {sum}");
            absorbing += 1;
        }
    }
}

#[test]
fn real_susceptibility_conserves_power() {
    let chi = ChiExpansion { chi1: Complex64::new(0.3, 0.0), chi3: Complex64::new(-0.7, 0.0) };
    for length in [1.0, 20.0, 80.0] {
        let (sum, _) = power_balance(&chi, 0.5, length);
        assert!((sum - 1.0).abs() < 1e-12, "L = {length}: {sum}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    /// Well inside the radius of convergence in `Ωc²`, halving `Ωc` divides
    /// the remainder of the two-term expansion by 16.
    #[test]
    fn expansion_remainder_is_quartic(
        delta_p in -3.0..3.0f64,
        delta_c in -3.0..3.0f64,
        delta_lg in -3.0..3.0f64,
        omega in 0.2..1.5f64,
        phase in 0.0..std::f64::consts::TAU,
    ) {
        let atom = AtomParams::default();
        let d = DriveConfig { delta_p, delta_c, delta_lg, ..Default::default() }
            .with_fields(0.0, Complex64::from_polar(omega, phase));
        let chi = chi_expansion(&atom, &d, CoefficientSource::Rederived).unwrap();
        let den = denominators(&atom, &d);
        let radius = (den.a4 * (den.a2 * den.a3 - d.lg_square()) / den.a3).norm();
        let h = 0.1 * radius.sqrt();
        let remainder = |oc: f64| {
            let full = chi_full(&atom, &d.with_fields(oc, d.omega_lg), SignConvention::Physical).unwrap();
            (full - chi.evaluate(oc)).norm()
        };
        let ratio = remainder(h) / remainder(0.5 * h);
        prop_assert!((15.0..=17.0).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn vortex_conventions_agree_for_real_amplitude(
        delta_p in -3.0..3.0f64,
        delta_lg in -3.0..3.0f64,
        omega in -1.5..1.5f64,
    ) {
        let atom = AtomParams::default();
        let hermitian = DriveConfig { delta_p, delta_lg, ..Default::default() }.with_fields(0.0, Complex64::new(omega, 0.0));
        let analytic = DriveConfig { vortex_square: VortexSquare::Analytic, ..hermitian };
        let a = chi_expansion(&atom, &hermitian, CoefficientSource::Rederived).unwrap();
        let b = chi_expansion(&atom, &analytic, CoefficientSource::Rederived).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn lossless_evolution_keeps_norm() {
    let atom = AtomParams { gamma2: 0.0, gamma3: 0.0, gamma4: 0.0 };
    let d = DriveConfig { delta_p: 0.3, delta_c: -0.5, delta_lg: 0.2, omega_p: 0.4, ..Default::default() }
        .with_fields(0.7, Complex64::from_polar(1.2, 0.5));
    let out = time_evolve(&atom, &d, AmplitudeState::ground(), 20.0, 0.01).unwrap();
    assert!((out.norm_sqr() - 1.0).abs() < 1e-9, "{}", out.norm_sqr());
}

#[test]
fn angular_pattern_peaks_are_order_intensities() {
    let atom = AtomParams::default();
    let chi = chi_expansion(&atom, &drive(0.0, 0.0, Complex64::new(1.5, 0.0)), CoefficientSource::Rederived).unwrap();
    let cfg = DiffractionConfig::default();
    let sin_theta: Vec<f64> = (-3..=3).map(|n| n as f64 / cfg.period_over_wavelength).collect();
    let pattern = full_angular_pattern(&chi, 0.2, &cfg, &sin_theta).unwrap();
    for (k, n) in (-3..=3).enumerate() {
        let expected = order_amplitude_closed_form(&chi, 0.2, &cfg, n).unwrap().norm_sqr();
        assert!((pattern[k] - expected).abs() <= 1e-9 * pattern[3], "order {n}: {} vs {expected}", pattern[k]);
    }
}

#[test]
fn slit_envelope_shape() {
    assert_eq!(slit_envelope(5, 2.0), 1.0);
    assert!((slit_envelope(5, 0.5) - 0.04).abs() < 1e-15);
    for k in 1..5 {
        assert!(slit_envelope(5, k as f64 / 5.0) < 1e-30, "zero at {k}/5");
    }
    let near = slit_envelope(5, 1e-9);
    assert!((near - 1.0).abs() < 1e-12);
}

#[test]
fn angular_pattern_rejects_impossible_angles() {
    let chi = ChiExpansion { chi1: Complex64::new(0.0, 0.1), chi3: Complex64::new(0.0, 0.0) };
    let r = full_angular_pattern(&chi, 0.2, &DiffractionConfig::default(), &[0.0, 1.5]);
    assert!(matches!(r, Err(DiffractionError::InvalidConfig(_))));
}
