//! Ray geometry `xi = tau e^{i eta} / |z|`, the coefficient `p(tau)` of the
//! first-order system and asymptotic data at the truncation point.
//!
//! With `psi = e^{i z xi}(u + v)` and `psi' = i z e^{i z xi}(u - v)` the
//! equation becomes, along the ray,
//! `u' = -p (u + v)`, `v' = -2 i omega v + p (u + v)`, with
//! `u(inf) = 1`, `v(inf) = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potentials::AnalyticPotential;
use crate::quadrature;

use super::JostOptions;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Integration ray for one value of `z`.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub z: Complex64,
    /// Angle of the ray in the xi-plane.
    pub eta: f64,
    /// `e^{i(arg z + eta)}`, with `im omega >= 0`.
    pub omega: Complex64,
    /// `d xi / d tau`.
    pub direction: Complex64,
    coef: Complex64,
}

impl Ray {
    /// Picks the ray used to continue `psi(., z)` from infinity to 0.
    ///
    /// Lower half-plane: the ray through `1/z` (so `omega = 1`), which must lie
    /// inside the sector. Upper half-plane and real axis: the positive axis.
    pub fn for_point(pot: &AnalyticPotential, z: Complex64, opts: &JostOptions) -> Result<Ray> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite z = {z}")));
        }
        if z.norm() < opts.z_min {
            return Err(Error::InvalidParameter(format!("|z| = {} is below z_min = {}", z.norm(), opts.z_min)));
        }
        let eta = if z.im < 0.0 {
            let theta = -z.arg();
            let theta0 = pot.sector();
            if theta >= pot.max_ray_angle(opts.sector_margin) {
                return Err(Error::OutOfContinuationSector { z, theta, theta0 });
            }
            theta
        } else {
            0.0
        };
        Ok(Ray::with_angle(z, eta))
    }

    pub fn with_angle(z: Complex64, eta: f64) -> Ray {
        let r = z.norm();
        let e = Complex64::from_polar(1.0, eta);
        Ray {
            z,
            eta,
            omega: Complex64::from_polar(1.0, z.arg() + eta),
            direction: e / r,
            coef: I * e / (2.0 * z * r),
        }
    }

    pub fn xi(&self, tau: f64) -> Complex64 {
        self.direction * tau
    }

    pub fn p(&self, pot: &AnalyticPotential, tau: f64) -> Complex64 {
        let v = self.coef * pot.value(self.xi(tau));
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `tau`-length over which `q` varies near `tau`.
    pub fn length_scale(&self, pot: &AnalyticPotential, tau: f64) -> f64 {
        pot.length_scale(self.xi(tau)) * self.z.norm()
    }
}

/// Asymptotic data at the truncation point `s`, split by order in `q`:
/// `u(s) = exp(p1 + p2)`, `v(s) = u(s) (phi1 + phi2)`.
#[derive(Debug, Clone, Copy)]
pub struct TailData {
    pub s: f64,
    pub p1: Complex64,
    pub p2: Complex64,
    pub phi1: Complex64,
    pub phi2: Complex64,
    /// Estimate of the neglected terms.
    pub error: f64,
}

impl TailData {
    pub fn u(&self) -> Complex64 {
        (self.p1 + self.p2).exp()
    }

    pub fn v(&self) -> Complex64 {
        self.u() * (self.phi1 + self.phi2)
    }

    /// Order-`n` parts `(u_n(s), v_n(s))`.
    pub fn order(&self, n: usize) -> (Complex64, Complex64) {
        let u = |m: usize| -> Complex64 {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..=m / 2 {
                let k = m - 2 * j;
                sum += self.p1.powu(k as u32) / factorial(k) * self.p2.powu(j as u32) / factorial(j);
            }
            sum
        };
        let un = u(n);
        let vn = match n {
            0 => Complex64::new(0.0, 0.0),
            1 => self.phi1 * u(0),
            _ => self.phi1 * u(n - 1) + self.phi2 * u(n - 2),
        };
        (un, vn)
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn local_error(pot: &AnalyticPotential, ray: &Ray, s: f64) -> (f64, Complex64, Complex64, Complex64) {
    let h = 1e-2 * s.min(ray.length_scale(pot, s));
    let pm = ray.p(pot, s - h);
    let p0 = ray.p(pot, s);
    let pp = ray.p(pot, s + h);
    let d1 = (pp - pm) / (2.0 * h);
    let d2 = (pp - 2.0 * p0 + pm) / (h * h);
    let err = d2.norm() / 8.0 + (p0 * d1).norm() + s * (p0.norm().powi(3) + d1.norm_sqr());
    (err, p0, d1, d2)
}

fn tail_integral<F: Fn(f64) -> Complex64>(f: F, s: f64, tol: f64) -> Result<Complex64> {
    // tau = s / x maps [s, inf) to (0, 1]
    let g = |x: f64| -> Complex64 {
        if x <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let v = f(s / x) * (s / (x * x));
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let breaks: Vec<f64> = std::iter::once(0.0).chain((0..=30).rev().map(|k| 0.5f64.powi(k))).collect();
    Ok(quadrature::integrate(g, &breaks, tol, 50_000)?.value)
}

/// Chooses the truncation point and the asymptotic data there.
pub fn tail_data(pot: &AnalyticPotential, ray: &Ray, tol: f64) -> Result<TailData> {
    let features = pot.feature_radii().into_iter().fold(1.0, f64::max);
    let mut s = (4.0f64).max(4.0 * ray.z.norm() * features);
    let err_at = |s: f64| [1.0, 1.25, 1.5, 2.0].iter().map(|f| local_error(pot, ray, f * s).0).fold(0.0, f64::max);
    let mut err = err_at(s);
    while !(err < 0.25 * tol) {
        s *= 2.0;
        if s > 1e9 {
            return Err(Error::QuadratureFailure(format!(
                "asymptotic tail data not accurate to {tol:e} (estimate {err:e})"
            )));
        }
        err = err_at(s);
    }
    let (_, ps, dps, _) = local_error(pot, ray, s);
    let w = ray.omega;
    let qtol = 1e-3 * tol;
    let int_p = tail_integral(|t| ray.p(pot, t), s, qtol)?;
    let int_p2 = tail_integral(|t| ray.p(pot, t).powu(2), s, qtol)?;
    Ok(TailData {
        s,
        p1: int_p,
        p2: -I / (2.0 * w) * int_p2 - ps * ps / (8.0 * w * w),
        phi1: -I * ps / (2.0 * w) + dps / (4.0 * w * w),
        phi2: -ps * ps / (2.0 * w * w),
        error: err,
    })
}

/// Panel boundaries on `[0, s]`: width at most `max_width` and at most a
/// fixed fraction of the local length scale of `q`.
pub fn panels(pot: &AnalyticPotential, ray: &Ray, s: f64, max_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = 0.0;
    while a < s {
        let mut w = max_width.min(0.3 * ray.length_scale(pot, a));
        w = w.min(0.3 * ray.length_scale(pot, (a + w).min(s)));
        w = w.max(1e-6 * max_width);
        let b = if a + w >= s * (1.0 - 1e-12) { s } else { a + w };
        out.push((a, b));
        a = b;
    }
    out
}
