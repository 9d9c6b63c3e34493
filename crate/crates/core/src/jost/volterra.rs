//! Backward marching of the (u, v) system from the truncation point to 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::potentials::AnalyticPotential;

use super::ray::{self, Ray};
use super::{assemble, JostOptions, JostResult, Method};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn march(pot: &AnalyticPotential, ray: &Ray, tail: &ray::TailData, rtol: f64, h_max: f64) -> Result<(Complex64, Complex64)> {
    let w = ray.omega;
    let stepper = Dopri5 { rtol, atol: 1e-3 * rtol, h_max, max_steps: 5_000_000 };
    let rhs = |t: f64, y: &[Complex64; 2]| {
        let f = ray.p(pot, t) * (y[0] + y[1]);
        [-f, f - 2.0 * I * w * y[1]]
    };
    let (y, _) = stepper.solve(rhs, tail.s, [tail.u(), tail.v()], 0.0, |_, _| {})?;
    Ok((y[0], y[1]))
}

pub fn volterra_solve(pot: &AnalyticPotential, z: Complex64, alpha: f64, opts: &JostOptions) -> Result<JostResult> {
    pot.validate()?;
    let ray = Ray::for_point(pot, z, opts)?;
    if pot.is_identically_zero() {
        return Ok(assemble(z, alpha, Complex64::new(1.0, 0.0), I * z, 0, 0.0, Method::Volterra));
    }
    let tol = opts.tol;
    let tail = ray::tail_data(pot, &ray, tol)?;
    let h_max = match opts.mesh_points {
        Some(m) if m > 0 => tail.s / m as f64,
        _ => opts.max_panel_width,
    };
    let (u1, v1) = march(pot, &ray, &tail, tol, h_max)?;
    let (u2, v2) = march(pot, &ray, &tail, tol / 16.0, h_max)?;
    let scale = 1.0 + u2.norm() + v2.norm();
    let difference = ((u1 - u2).norm() + (v1 - v2).norm()) / scale;
    if difference > 10.0 * tol {
        return Err(Error::MeshTooCoarse { difference, tol });
    }
    Ok(assemble(z, alpha, u2 + v2, I * z * (u2 - v2), 0, difference + tail.error, Method::Volterra))
}
