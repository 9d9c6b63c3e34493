//! Spectral density `rho'(mu) = sqrt(mu) / (pi |Psi(sqrt mu)|^2)`, the
//! Weyl–Titchmarsh function and real-axis points of spectral concentration.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{evaluate, JostOptions, Method};
use crate::potentials::AnalyticPotential;

/// `|Psi|` below this multiple of `|psi(0)| + |psi'(0)|` is treated as a zero.
pub const DENOMINATOR_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub mu: f64,
    pub rho_prime: f64,
}

/// Strict local maximum of `rho'`, with the second difference at the refined point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationPoint {
    pub mu: f64,
    pub rho_prime: f64,
    pub curvature: f64,
}

pub fn spectral_density(pot: &AnalyticPotential, alpha: f64, mu: f64, opts: &JostOptions) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!("spectral parameter mu = {mu} must be positive")));
    }
    let z = Complex64::new(mu.sqrt(), 0.0);
    let r = evaluate(pot, z, alpha, Method::Volterra, opts)?;
    let d = r.big_psi.norm_sqr();
    if d == 0.0 {
        return Err(Error::DegenerateDenominator { value: 0.0 });
    }
    Ok(mu.sqrt() / (std::f64::consts::PI * d))
}

/// Density on a list of points, evaluated in parallel.
pub fn spectral_samples(pot: &AnalyticPotential, alpha: f64, mus: &[f64], opts: &JostOptions) -> Result<Vec<SpectralSample>> {
    mus.par_iter()
        .map(|&mu| spectral_density(pot, alpha, mu, opts).map(|rho_prime| SpectralSample { mu, rho_prime }))
        .collect()
}

/// `m(lambda) = (psi'(0) cos(alpha) - psi(0) sin(alpha)) / Psi` with `z = sqrt(lambda)`, `im z > 0`.
pub fn m_function(pot: &AnalyticPotential, alpha: f64, lambda: Complex64, opts: &JostOptions) -> Result<Complex64> {
    if lambda.im == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("m-function needs im lambda != 0, got {lambda}")));
    }
    let mut z = lambda.sqrt();
    if z.im < 0.0 {
        z = -z;
    }
    let r = evaluate(pot, z, alpha, Method::Volterra, opts)?;
    let (s, c) = alpha.sin_cos();
    let scale = r.psi0.norm() + r.dpsi0.norm();
    if r.big_psi.norm() <= DENOMINATOR_FLOOR * scale {
        return Err(Error::DegenerateDenominator { value: r.big_psi.norm() });
    }
    Ok((r.dpsi0 * c - r.psi0 * s) / r.big_psi)
}

/// Scan `rho'` on a uniform grid of `grid_n` points over `mu_range` and refine
/// every interior strict local maximum by golden-section search.
pub fn concentration_scan(
    pot: &AnalyticPotential,
    alpha: f64,
    mu_range: (f64, f64),
    grid_n: usize,
    opts: &JostOptions,
) -> Result<Vec<ConcentrationPoint>> {
    let (lo, hi) = mu_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid mu range ({lo}, {hi})")));
    }
    if grid_n < 3 {
        return Err(Error::InvalidParameter("concentration scan needs at least 3 grid points".into()));
    }
    let h = (hi - lo) / (grid_n - 1) as f64;
    let mus: Vec<f64> = (0..grid_n).map(|k| lo + h * k as f64).collect();
    let samples = spectral_samples(pot, alpha, &mus, opts)?;
    let rho = |mu: f64| spectral_density(pot, alpha, mu, opts);
    let mut out = Vec::new();
    for k in 1..grid_n - 1 {
        let (a, b, c) = (samples[k - 1].rho_prime, samples[k].rho_prime, samples[k + 1].rho_prime);
        if !(b > a && b > c) {
            continue;
        }
        let mu = golden_max(&rho, mus[k - 1], mus[k + 1], 1e-10 * (1.0 + mus[k]))?;
        let dh = h / 10.0;
        let (fm, f0, fp) = (rho(mu - dh)?, rho(mu)?, rho(mu + dh)?);
        let curvature = (fp - 2.0 * f0 + fm) / (dh * dh);
        if curvature < 0.0 {
            out.push(ConcentrationPoint { mu, rho_prime: f0, curvature });
        }
    }
    Ok(out)
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}
