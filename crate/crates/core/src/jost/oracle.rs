//! Independent reference for the physical sheet: the second-order equation is
//! integrated along the real axis with classical RK4 and step doubling, from
//! Liouville-Green data at `x_max` down to 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potentials::AnalyticPotential;
use crate::quadrature;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

type Y = [Complex64; 2];

fn rk4<F: Fn(f64, &Y) -> Y>(f: &F, x: f64, y: &Y, h: f64) -> Y {
    let add = |y: &Y, k: &Y, s: f64| [y[0] + k[0] * s, y[1] + k[1] * s];
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = f(x + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = f(x + h, &add(y, &k3, h));
    [
        y[0] + (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) * (h / 6.0),
        y[1] + (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) * (h / 6.0),
    ]
}

/// `(psi(0, z), psi'(0, z))` for `im z > 0`.
pub fn oracle_backward_integration(
    pot: &AnalyticPotential,
    z: Complex64,
    x_max: f64,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidParameter("the oracle needs im z > 0".into()));
    }
    if !(x_max > 0.0) {
        return Err(Error::InvalidParameter("x_max must be positive".into()));
    }
    let q = |x: f64| pot.value(Complex64::new(x, 0.0)).re;
    let k_of = |x: f64| z * (1.0 - q(x) / (z * z)).sqrt();
    // phase correction int_X^inf (k - z) = -int q/(k + z)
    let g = |s: f64| -> Complex64 {
        if s <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = x_max / s;
        let v = -q(x) / (k_of(x) + z) * (x_max / (s * s));
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let breaks: Vec<f64> = std::iter::once(0.0).chain((0..=30).rev().map(|k| 0.5f64.powi(k))).collect();
    let phase = quadrature::integrate(g, &breaks, 1e-3 * tol, 50_000)?.value;
    let kx = k_of(x_max);
    let h = 1e-4 * x_max;
    let dq = (q(x_max + h) - q(x_max - h)) / (2.0 * h);
    // psi = e^{izx} phi with phi'' + 2iz phi' = q phi
    let phi = (z / kx).sqrt() * (-I * phase).exp();
    let dphi = phi * (I * (kx - z) + dq / (4.0 * kx * kx));

    let rhs = |x: f64, y: &Y| [y[1], q(x) * y[0] - 2.0 * I * z * y[1]];
    let mut x = x_max;
    let mut y: Y = [phi, dphi];
    let mut h = -(0.01f64).min(0.1 / z.norm()).min(x_max);
    let mut steps = 0usize;
    while x > 0.0 {
        if x + h < 0.0 {
            h = -x;
        }
        let full = rk4(&rhs, x, &y, h);
        let half = rk4(&rhs, x, &y, 0.5 * h);
        let two = rk4(&rhs, x + 0.5 * h, &half, 0.5 * h);
        let scale = 1.0 + two[0].norm() + two[1].norm() / z.norm().max(1.0);
        let err = ((two[0] - full[0]).norm() + (two[1] - full[1]).norm() / z.norm().max(1.0)) / 15.0 / scale;
        let local_tol = (tol * h.abs() / x_max).max(1e-15);
        if err <= local_tol || h.abs() < 1e-12 {
            x += h;
            // Richardson extrapolation of the doubled step
            y = [two[0] + (two[0] - full[0]) / 15.0, two[1] + (two[1] - full[1]) / 15.0];
        }
        let factor = if err == 0.0 { 2.0 } else { (0.9 * (local_tol / err).powf(0.2)).clamp(0.2, 2.0) };
        h *= factor;
        h = h.max(-1.0);
        steps += 1;
        if steps > 20_000_000 {
            return Err(Error::StepperFailure("oracle step budget exhausted".into()));
        }
        if !(y[0].re.is_finite() && y[0].im.is_finite()) {
            return Err(Error::StepperFailure("oracle solution overflowed".into()));
        }
    }
    Ok((y[0], I * z * y[0] + y[1]))
}

/// Default matching point: far enough that the neglected terms of the
/// Liouville-Green data are below roughly 1e-9.
pub fn default_oracle_x(pot: &AnalyticPotential, z: Complex64) -> f64 {
    let small = (1.0 / z.norm()).max(1.0);
    match pot {
        AnalyticPotential::ExpSine { a } => 40.0 * small / a.min(1.0),
        AnalyticPotential::GaussianMonomial { scale, .. } => 10.0 * scale.max(1.0),
        _ => (400.0 * small.powf(4.0 / 3.0)).max(40.0 * pot.feature_radii().into_iter().fold(1.0, f64::max)),
    }
}
