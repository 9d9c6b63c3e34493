use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;
use sturm_resonance::regions::{
    boundary_curve, certify_dirichlet, certify_general, delta_of, dirichlet_sector, sector_certificate, theta_grid,
    Criterion,
};
use sturm_resonance::{AnalyticPotential, Error};

const TOL: f64 = 1e-9;

fn ex41() -> AnalyticPotential {
    AnalyticPotential::InversePower { c: 1.0, a: 1.0, gamma: 2.0 }
}

fn ex42(c: f64) -> AnalyticPotential {
    AnalyticPotential::InversePowerN { c, a: 1.0, n: 2, gamma: 2.0 }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(a) < 0.0) == (f(m) < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn delta_cases() {
    assert_eq!(delta_of(0.0, Complex64::new(0.3, -2.0)).unwrap(), 1.0);
    let a = 3.0 * PI / 4.0;
    assert!(matches!(delta_of(a, Complex64::new(0.0, -1.0)), Err(Error::Degenerate { .. })));
    assert!(delta_of(a, Complex64::new(1.0, -1.0)).unwrap() > 1.0);
}

#[test]
fn general_certificate_examples() {
    let v = certify_general(&ex42(-1.0), 0.0, Complex64::new(3.0, -0.5), TOL).unwrap();
    assert!(v.certified);
    assert!(certify_general(&AnalyticPotential::zero(), 0.7, Complex64::new(0.1, -0.1), TOL).unwrap().certified);
    let z = Complex64::from_polar(1.0 / (2.0 * LN_2), -1e-3);
    let v = certify_general(&ex41(), 0.0, z, TOL).unwrap();
    assert!(!v.certified);
    assert!((v.lhs - 1.0).abs() < 1e-5 && (v.rhs - 0.5).abs() < 1e-12);
}

#[test]
fn dirichlet_certificate_examples() {
    let v = certify_dirichlet(&ex42(1.0), Complex64::new(1.0, -1e-12), TOL).unwrap();
    assert!((v.lhs - 0.5).abs() < 1e-9);
    assert!(v.certified);
    assert!(matches!(certify_dirichlet(&ex41(), Complex64::new(1.0, -0.5), TOL), Err(Error::GammaTooSmall { .. })));
}

#[test]
fn dirichlet_sector_examples() {
    let theta1 = dirichlet_sector(&ex42(1.0), TOL).unwrap().unwrap();
    let want = bisect(|t| 2.0 * t / (2.0 * t).sin() - 2.0 * LN_2, 1e-6, FRAC_PI_2 - 1e-6);
    assert!((theta1 - want).abs() < 2e-4, "{theta1} vs {want}");
    assert_eq!(dirichlet_sector(&ex42(2.0), TOL).unwrap(), None);
    let free = AnalyticPotential::InversePowerN { c: 0.0, a: 1.0, n: 2, gamma: 2.0 };
    let t = dirichlet_sector(&free, TOL).unwrap().unwrap();
    assert!((t - FRAC_PI_2).abs() < 1e-2);
}

#[test]
fn small_weighted_norm_gives_dirichlet_sector() {
    // int t |q(t)| dt = |c| / 2 for this family
    for c in [0.05, 0.2, 0.34] {
        let pot = ex42(c);
        let w = pot.ray_integral(0.0, 1, 1e-12).unwrap().value;
        assert!((w - c / 2.0).abs() < 1e-9);
        if w < 0.1735 {
            assert!(dirichlet_sector(&pot, TOL).unwrap().is_some());
        }
    }
}

#[test]
fn boundary_inverse_square() {
    let thetas = theta_grid(&ex41(), 12);
    let curve = boundary_curve(&ex41(), 0.0, Criterion::General, &thetas, 1e-10).unwrap();
    assert!(curve.failed.is_empty());
    for s in &curve.samples {
        let want = s.theta / (s.theta.sin() * LN_2);
        assert!((s.radius - want).abs() < 1e-7 * want);
    }
    // im z = -theta / log 2 approaches -pi / log 2 from above
    for s in &curve.samples {
        assert!((s.z().im + s.theta / LN_2).abs() < 1e-7);
        assert!(s.z().im > -PI / LN_2);
    }
}

#[test]
fn boundary_shifted_pole_intercept() {
    let pot = AnalyticPotential::shifted_pole_rational(1.0);
    let curve = boundary_curve(&pot, 0.0, Criterion::General, &[1e-6], 1e-11).unwrap();
    assert!((curve.samples[0].radius - 0.25 / LN_2).abs() < 1e-4 * 0.3607);
}

#[test]
fn boundary_gaussian_hyperbola() {
    let pot = AnalyticPotential::GaussianMonomial { c: -1.0, m: 0, n: 2, scale: 1.0 };
    let k = (PI.sqrt() / 2.0) / LN_2;
    let thetas = theta_grid(&pot, 10);
    let curve = boundary_curve(&pot, 0.0, Criterion::General, &thetas, 1e-10).unwrap();
    for s in &curve.samples {
        let z = s.z();
        assert!((z.re * z.re - z.im * z.im - k * k).abs() < 1e-6 * k * k, "theta {}", s.theta);
    }
}

#[test]
fn boundary_fixed_point_for_obtuse_alpha() {
    let alpha = 2.5;
    let thetas = [0.3, 1.0, 2.0];
    let curve = boundary_curve(&ex41(), alpha, Criterion::General, &thetas, 1e-11).unwrap();
    for s in &curve.samples {
        let d = delta_of(alpha, s.z()).unwrap();
        let i = ex41().ray_integral(s.theta, 0, 1e-11).unwrap().value;
        assert!((s.radius * (1.0 + 1.0 / d).ln() - i).abs() < 1e-8);
    }
}

#[test]
fn sector_certificates() {
    let free = AnalyticPotential::zero();
    let sc = sector_certificate(&free, 0.0, TOL).unwrap();
    assert_eq!(sc.r1, 0.0);
    assert!(sc.theta1 > PI - 0.01);
    let sc = sector_certificate(&ex41(), 0.0, TOL).unwrap();
    assert!((sc.r1 - 1.001 / LN_2).abs() < 1e-6);
    assert!(sc.theta1 > 0.0 && sc.theta1 < PI);
    let sc = sector_certificate(&ex42(-20.0), 0.0, TOL).unwrap();
    assert!((sc.r1 - 1.001 * 5.0 * PI / LN_2).abs() < 1e-5);
}

#[test]
fn certificate_is_sharp_at_boundary() {
    for pot in [ex41(), ex42(-3.0), AnalyticPotential::shifted_pole_rational(2.0)] {
        let thetas = theta_grid(&pot, 8);
        let curve = boundary_curve(&pot, 0.0, Criterion::General, &thetas, 1e-11).unwrap();
        for s in &curve.samples {
            let outside = Complex64::from_polar(1.05 * s.radius, -s.theta);
            let inside = Complex64::from_polar(0.95 * s.radius, -s.theta);
            assert!(certify_general(&pot, 0.0, outside, TOL).unwrap().certified);
            assert!(!certify_general(&pot, 0.0, inside, TOL).unwrap().certified);
        }
    }
}
