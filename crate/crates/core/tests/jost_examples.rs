use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use sturm_resonance::jost::{
    evaluate, free_boundary_factor, iterate_series, iterate_series_terms, oracle_backward_integration, term_bound,
    volterra_solve, JostOptions, Method,
};
use sturm_resonance::resonances::{shoot_determinant, winding_count, ScalingConfig, SearchRegion};
use sturm_resonance::{AnalyticPotential, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ex41() -> AnalyticPotential {
    AnalyticPotential::InversePower { c: 1.0, a: 1.0, gamma: 2.0 }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn free_potential_gives_boundary_factor() {
    let pot = AnalyticPotential::InversePower { c: 0.0, a: 1.0, gamma: 2.0 };
    let opts = JostOptions::default();
    for z in [c(0.3, 0.7), c(2.0, -1.0), c(-1.5, -0.2)] {
        let r = iterate_series(&pot, z, FRAC_PI_4, &opts).unwrap();
        assert!((r.big_psi - free_boundary_factor(z, FRAC_PI_4)).norm() < 1e-15);
        let v = volterra_solve(&pot, z, FRAC_PI_4, &opts).unwrap();
        assert_eq!((v.psi0, v.dpsi0), (c(1.0, 0.0), Complex64::i() * z));
    }
}

#[test]
fn series_against_oracle() {
    let opts = JostOptions::default();
    let z = c(1.0, 1.0);
    let r = iterate_series(&ex41(), z, 0.0, &opts).unwrap();
    let (p0, _) = oracle_backward_integration(&ex41(), z, 400.0, 1e-11).unwrap();
    assert!(rel(r.psi0, p0) < 1e-6);
    assert!(r.tail_bound < opts.tol);
}

#[test]
fn oracle_free_problem() {
    let pot = AnalyticPotential::zero();
    let (p0, dp0) = oracle_backward_integration(&pot, c(0.0, 1.0), 30.0, 1e-12).unwrap();
    assert!((p0 - 1.0).norm() < 1e-10);
    assert!((dp0 - c(-1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn oracle_references() {
    let opts = JostOptions::default();
    let z = c(0.0, 2.0);
    let (p0, dp0) = oracle_backward_integration(&ex41(), z, 400.0, 1e-11).unwrap();
    let r = volterra_solve(&ex41(), z, 0.0, &opts).unwrap();
    assert!(rel(r.psi0, p0) < 1e-7 && rel(r.dpsi0, dp0) < 1e-7);

    let es = AnalyticPotential::ExpSine { a: 1.0 };
    let z = c(1.0, 0.5);
    let (p0, dp0) = oracle_backward_integration(&es, z, 60.0, 1e-11).unwrap();
    let r = iterate_series(&es, z, 0.0, &opts).unwrap();
    assert!(rel(r.psi0, p0) < 1e-7 && rel(r.dpsi0, dp0) < 1e-7);
}

#[test]
fn volterra_matches_series() {
    let opts = JostOptions::default();
    let z = c(1.0, 1.0);
    let s = iterate_series(&ex41(), z, 0.0, &opts).unwrap();
    let v = volterra_solve(&ex41(), z, 0.0, &opts).unwrap();
    assert!((s.big_psi - v.big_psi).norm() < 1e-8);
}

#[test]
fn volterra_matches_shooting_in_lower_half() {
    let pot = AnalyticPotential::InversePowerN { c: -1.0, a: 1.0, n: 2, gamma: 2.0 };
    let z = Complex64::from_polar(2.0, -0.2);
    let v = volterra_solve(&pot, z, 0.0, &JostOptions::default()).unwrap();
    let d = shoot_determinant(&pot, 0.0, &ScalingConfig::with_phi(1.0), z).unwrap();
    assert!(rel(d, v.big_psi) < 1e-6, "{d} vs {}", v.big_psi);
}

#[test]
fn shifted_pole_near_table_entry() {
    // |Psi| at the two-decimal table point is small but a zero sits within 0.02
    let pot = AnalyticPotential::shifted_pole_rational(10.0);
    let z0 = c(0.42, -0.55);
    let opts = JostOptions::default();
    let r = evaluate(&pot, z0, 0.0, Method::Volterra, &opts).unwrap();
    let far = evaluate(&pot, c(2.0, -0.1), 0.0, Method::Volterra, &opts).unwrap();
    assert!(r.normalized_psi.unwrap().norm() < 0.05);
    assert!(r.big_psi.norm() < 0.1 * far.big_psi.norm());
    let h = 1e-6;
    let mut z = z0;
    for _ in 0..30 {
        let f = volterra_solve(&pot, z, 0.0, &opts).unwrap().big_psi;
        let df = (volterra_solve(&pot, z + h, 0.0, &opts).unwrap().big_psi - f) / h;
        z -= f / df;
    }
    assert!((z.re - z0.re).abs() < 0.02 && (z.im - z0.im).abs() < 0.02, "{z}");
}

#[test]
fn term_bound_examples() {
    let opts = JostOptions::default();
    let z = Complex64::from_polar(2.0, -0.3);
    assert_eq!(term_bound(&ex41(), z, 0, &opts).unwrap(), 1.0);
    let b1 = term_bound(&ex41(), z, 1, &opts).unwrap();
    let rate = 0.3 / (0.3f64.sin() * 2.0);
    assert!((b1 - rate).abs() < 1e-8);
    let start = rate.ceil() as usize;
    let bounds: Vec<f64> = (start..start + 10).map(|n| term_bound(&ex41(), z, n, &opts).unwrap()).collect();
    assert!(bounds.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn majorant_bounds_terms() {
    let opts = JostOptions::default();
    for z in [c(1.0, 1.0), Complex64::from_polar(1.5, -1.0), c(0.5, 0.0)] {
        let st = iterate_series_terms(&ex41(), z, 0.0, &opts).unwrap();
        for (n, (u, v)) in st.terms.iter().enumerate() {
            let b = term_bound(&ex41(), z, n, &opts).unwrap();
            assert!(u.norm() + v.norm() <= b * (1.0 + 1e-9) + 1e-14, "z {z} n {n}");
        }
    }
}

#[test]
fn domain_errors() {
    let opts = JostOptions::default();
    let p42 = AnalyticPotential::InversePowerN { c: 1.0, a: 1.0, n: 2, gamma: 2.0 };
    let outside = Complex64::from_polar(1.0, -1.7);
    assert!(matches!(iterate_series(&p42, outside, 0.0, &opts), Err(Error::OutOfContinuationSector { .. })));
    assert!(iterate_series(&ex41(), c(1e-4, 0.0), 0.0, &opts).is_err());
    let strong = AnalyticPotential::InversePower { c: 50.0, a: 1.0, gamma: 2.0 };
    let few = JostOptions { n_max: 3, ..opts };
    assert!(matches!(iterate_series(&strong, c(0.5, -0.2), 0.0, &few), Err(Error::SlowConvergence { .. })));
}

#[test]
fn no_zeros_in_upper_half() {
    let pot = AnalyticPotential::shifted_pole_rational(10.0);
    let opts = JostOptions::default();
    let f = |z: Complex64| evaluate(&pot, z, 0.0, Method::Volterra, &opts).map(|r| r.big_psi);
    let region = SearchRegion::rect(0.1, 5.0, 0.05, 5.0);
    assert_eq!(winding_count(&f, &region, 24).unwrap(), 0);
}

#[test]
fn cauchy_integral_reproduces_center() {
    let pot = AnalyticPotential::InversePowerN { c: -1.0, a: 1.0, n: 2, gamma: 2.0 };
    let opts = JostOptions::default();
    let center = Complex64::from_polar(2.0, -0.5);
    let radius = 0.2;
    let m = 64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let t = 2.0 * PI * k as f64 / m as f64;
        let z = center + Complex64::from_polar(radius, t);
        sum += volterra_solve(&pot, z, 0.3, &opts).unwrap().big_psi;
    }
    let mean = sum / m as f64;
    let direct = volterra_solve(&pot, center, 0.3, &opts).unwrap().big_psi;
    assert!((mean - direct).norm() < 1e-4 * direct.norm());
}
