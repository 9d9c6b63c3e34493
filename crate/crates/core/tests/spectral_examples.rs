use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use sturm_resonance::jost::JostOptions;
use sturm_resonance::resonances::{NewtonOptions, ScalingConfig, Shooter};
use sturm_resonance::spectral::{concentration_scan, m_function, spectral_density, spectral_samples};
use sturm_resonance::AnalyticPotential;

#[test]
fn free_density_both_conditions() {
    let pot = AnalyticPotential::zero();
    let opts = JostOptions::default();
    for mu in [0.05, 0.7, 3.0] {
        assert!((spectral_density(&pot, 0.0, mu, &opts).unwrap() - mu.sqrt() / PI).abs() < 1e-14);
        assert!((spectral_density(&pot, FRAC_PI_2, mu, &opts).unwrap() - 1.0 / (PI * mu.sqrt())).abs() < 1e-12);
    }
    assert!(concentration_scan(&pot, FRAC_PI_2, (0.01, 3.0), 60, &opts).unwrap().is_empty());
}

#[test]
fn free_m_function() {
    let pot = AnalyticPotential::zero();
    let opts = JostOptions::default();
    let z = Complex64::from_polar(1.0, FRAC_PI_4);
    let m = m_function(&pot, 0.0, Complex64::i(), &opts).unwrap();
    assert!((m - Complex64::i() * z).norm() < 1e-14);
    let m = m_function(&pot, FRAC_PI_2, Complex64::i(), &opts).unwrap();
    assert!((m - Complex64::i() / z).norm() < 1e-14);
}

/// Concentration point and nearby resonance for the two documented cases.
fn check_concentration(pot: AnalyticPotential, phi: f64, seed: Complex64, expect_mu: f64) {
    let opts = JostOptions::default();
    let pts = concentration_scan(&pot, 0.0, (0.02, 2.0), 200, &opts).unwrap();
    assert_eq!(pts.len(), 1, "{pts:?}");
    let p = pts[0];
    assert!((p.mu - expect_mu).abs() < 0.05, "{}", p.mu);
    assert!(p.curvature < 0.0 && p.rho_prime > 0.0);
    let r = Shooter::new(&pot, 0.0, &ScalingConfig::with_phi(phi)).unwrap().polish(seed, &NewtonOptions::default()).unwrap();
    assert!(r.z.im.abs() < 0.1);
    assert!((p.mu - r.z.re * r.z.re).abs() < 0.1);
}

#[test]
fn shifted_pole_concentration() {
    check_concentration(AnalyticPotential::shifted_pole_rational(35.0), 3.0, Complex64::new(0.50, -0.06), 0.26);
}

#[test]
fn quartic_concentration() {
    check_concentration(AnalyticPotential::quartic_binomial_rational(11.0), 0.75, Complex64::new(0.39, -0.03), 0.15);
}

#[test]
fn density_positive_on_grid() {
    let pot = AnalyticPotential::shifted_pole_rational(35.0);
    let mus: Vec<f64> = (1..=40).map(|k| 0.05 * k as f64).collect();
    let s = spectral_samples(&pot, 0.0, &mus, &JostOptions::default()).unwrap();
    assert!(s.iter().all(|x| x.rho_prime > 0.0));
}
