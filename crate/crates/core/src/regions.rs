//! Resonance-free regions: pointwise certificates, boundary curves and
//! sectorial certificates in the lower half `z`-plane.

use std::f64::consts::{FRAC_PI_2, LN_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::free_boundary_factor;
use crate::potentials::{AnalyticPotential, DEFAULT_SECTOR_MARGIN};

/// Relative safety margin applied to the sectorial radius.
pub const SECTOR_RADIUS_MARGIN: f64 = 1e-3;
const FIXED_POINT_MAX_ITER: usize = 100;
const FIXED_POINT_TOL: f64 = 1e-10;
const BISECTION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    General,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionVerdict {
    pub z: Complex64,
    pub certified: bool,
    pub criterion: Criterion,
    pub lhs: f64,
    pub rhs: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub radius: f64,
}

impl BoundarySample {
    /// Point `radius e^{-i theta}` on the curve.
    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.radius, -self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub samples: Vec<BoundarySample>,
    pub alpha: f64,
    pub criterion: Criterion,
    /// Angles for which no radius could be determined, with the reason.
    pub failed: Vec<(f64, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorCertificate {
    #[serde(rename = "R1")]
    pub r1: f64,
    pub theta1: f64,
}

/// `(cos a - i z sin a) / (cos a + i z sin a)`.
pub fn z_ratio(alpha: f64, z: Complex64) -> Result<Complex64> {
    let den = free_boundary_factor(z, alpha);
    if den.norm() < 1e-14 * (1.0 + z.norm()) {
        return Err(Error::Degenerate { z });
    }
    Ok((alpha.cos() - Complex64::i() * z * alpha.sin()) / den)
}

/// The boundary-condition factor `delta(alpha, z)` for `im z < 0`.
pub fn delta_of(alpha: f64, z: Complex64) -> Result<f64> {
    if !(0.0..std::f64::consts::PI).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} is outside [0, pi)")));
    }
    let ratio = z_ratio(alpha, z)?;
    Ok(if alpha <= FRAC_PI_2 { 1.0 } else { ratio.norm() })
}

fn lower_half_angle(pot: &AnalyticPotential, z: Complex64) -> Result<f64> {
    if !(z.im < 0.0) {
        return Err(Error::InvalidParameter(format!("z = {z} is not in the lower half-plane")));
    }
    let theta = -z.arg();
    if theta >= pot.max_ray_angle(DEFAULT_SECTOR_MARGIN) {
        return Err(Error::OutOfContinuationSector { z, theta, theta0: pot.sector() });
    }
    Ok(theta)
}

/// Non-resonance test `I(theta) < |z| log(1 + 1/delta)`.
pub fn certify_general(pot: &AnalyticPotential, alpha: f64, z: Complex64, tol: f64) -> Result<RegionVerdict> {
    let theta = lower_half_angle(pot, z)?;
    let delta = delta_of(alpha, z)?;
    let lhs = pot.ray_integral(theta, 0, 0.1 * tol)?.value;
    let rhs = z.norm() * (1.0 + 1.0 / delta).ln();
    Ok(RegionVerdict { z, certified: lhs < rhs - tol, criterion: Criterion::General, lhs, rhs, delta })
}

/// Dirichlet non-resonance test `int t |q(t e^{-i theta})| dt < log 2`.
pub fn certify_dirichlet(pot: &AnalyticPotential, z: Complex64, tol: f64) -> Result<RegionVerdict> {
    let gamma = pot.decay_exponent();
    if gamma <= 2.0 {
        return Err(Error::GammaTooSmall { gamma });
    }
    let theta = lower_half_angle(pot, z)?;
    let lhs = pot.ray_integral(theta, 1, 0.1 * tol)?.value;
    Ok(RegionVerdict { z, certified: lhs < LN_2 - tol, criterion: Criterion::Dirichlet, lhs, rhs: LN_2, delta: 1.0 })
}

/// `n` equally spaced angles strictly inside `(0, theta_max)`.
pub fn theta_grid(pot: &AnalyticPotential, n: usize) -> Vec<f64> {
    let top = pot.max_ray_angle(DEFAULT_SECTOR_MARGIN);
    (1..=n).map(|k| top * k as f64 / (n + 1) as f64).collect()
}

fn boundary_radius(pot: &AnalyticPotential, alpha: f64, criterion: Criterion, theta: f64, tol: f64) -> Result<f64> {
    match criterion {
        Criterion::Dirichlet => {
            let v = certify_dirichlet(pot, Complex64::from_polar(1.0, -theta), tol)?;
            if v.certified {
                Ok(0.0)
            } else {
                Err(Error::NoConvergence(format!("weighted integral {} is not below log 2", v.lhs)))
            }
        }
        Criterion::General => {
            let i = pot.ray_integral(theta, 0, tol)?.value;
            if alpha <= FRAC_PI_2 || i == 0.0 {
                return Ok(i / LN_2);
            }
            let g = |r: f64| -> Result<f64> {
                let d = delta_of(alpha, Complex64::from_polar(r, -theta))?;
                Ok(i / (1.0 + 1.0 / d).ln())
            };
            let mut r = i / LN_2;
            for _ in 0..FIXED_POINT_MAX_ITER {
                let next = 0.5 * r + 0.5 * g(r)?;
                if (next - r).abs() <= FIXED_POINT_TOL * next.max(1e-300) {
                    return Ok(next);
                }
                r = next;
            }
            Err(Error::NoConvergence(format!("fixed-point iteration for the radius at theta = {theta}")))
        }
    }
}

/// Boundary of the certified region, sampled on `thetas`.
///
/// Radius 0 under the Dirichlet criterion means the whole ray is certified.
pub fn boundary_curve(
    pot: &AnalyticPotential,
    alpha: f64,
    criterion: Criterion,
    thetas: &[f64],
    tol: f64,
) -> Result<BoundaryCurve> {
    pot.validate()?;
    let top = pot.max_ray_angle(DEFAULT_SECTOR_MARGIN);
    if let Some(bad) = thetas.iter().find(|t| !(**t > 0.0 && **t < top)) {
        return Err(Error::InvalidParameter(format!("theta = {bad} is outside (0, {top})")));
    }
    if thetas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("theta grid must be strictly increasing".into()));
    }
    let results: Vec<(f64, Result<f64>)> = thetas
        .par_iter()
        .map(|&t| (t, boundary_radius(pot, alpha, criterion, t, tol)))
        .collect();
    let mut samples = Vec::new();
    let mut failed = Vec::new();
    for (theta, r) in results {
        match r {
            Ok(radius) => samples.push(BoundarySample { theta, radius }),
            Err(e) => failed.push((theta, e.to_string())),
        }
    }
    Ok(BoundaryCurve { samples, alpha, criterion, failed })
}

/// Largest angle `theta1` (to [`BISECTION_TOL`]) such that `ok` holds on a
/// verification grid of `[0, theta1]`, capped at `top`.
fn largest_certified_angle<F: Fn(f64) -> Result<bool> + Sync>(ok: F, top: f64) -> Result<f64> {
    // quadrature failure close to a singularity counts as "not certified"
    let check = |t: f64| -> Result<bool> {
        match ok(t) {
            Err(Error::QuadratureFailure(_)) => Ok(false),
            other => other,
        }
    };
    let n = 200;
    let grid: Vec<f64> = (0..=n).map(|k| top * k as f64 / n as f64 * (1.0 - 1e-9)).collect();
    let mut first_bad = None;
    for (c, chunk) in grid.chunks(16).enumerate() {
        let flags: Vec<bool> = chunk.par_iter().map(|&t| check(t)).collect::<Result<Vec<_>>>()?;
        if let Some(k) = flags.iter().position(|f| !f) {
            first_bad = Some(16 * c + k);
            break;
        }
    }
    let Some(first_bad) = first_bad else {
        return Ok(top);
    };
    if first_bad == 0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (grid[first_bad - 1], grid[first_bad]);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if check(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Sector `|z| >= R1`, `0 < -arg z < theta1` free of resonances.
pub fn sector_certificate(pot: &AnalyticPotential, alpha: f64, tol: f64) -> Result<SectorCertificate> {
    pot.validate()?;
    let top = pot.max_ray_angle(DEFAULT_SECTOR_MARGIN);
    if pot.is_identically_zero() {
        return Ok(SectorCertificate { r1: 0.0, theta1: top });
    }
    let i0 = pot.ray_integral(0.0, 0, tol)?.value;
    let r1 = (1.0 + SECTOR_RADIUS_MARGIN) * i0 / LN_2;
    let ok = |theta: f64| -> Result<bool> {
        let i = pot.ray_integral(theta, 0, tol)?.value;
        let factor = if alpha <= FRAC_PI_2 { LN_2 } else { (1.0 + theta.cos().abs() / (1.0 + theta.sin())).ln() };
        Ok(i < r1 * factor - tol)
    };
    let theta1 = largest_certified_angle(ok, top)?;
    Ok(SectorCertificate { r1, theta1 })
}

/// Dirichlet sector `|z| > 0`, `0 < -arg z < theta1`, when
/// `int t |q(t)| dt < log 2`.
pub fn dirichlet_sector(pot: &AnalyticPotential, tol: f64) -> Result<Option<f64>> {
    pot.validate()?;
    let top = pot.max_ray_angle(DEFAULT_SECTOR_MARGIN);
    if pot.is_identically_zero() {
        return Ok(Some(top));
    }
    let gamma = pot.decay_exponent();
    if gamma <= 2.0 {
        return Err(Error::GammaTooSmall { gamma });
    }
    let ok = |theta: f64| -> Result<bool> { Ok(pot.ray_integral(theta, 1, 0.1 * tol)?.value < LN_2 - tol) };
    if !ok(0.0)? {
        return Ok(None);
    }
    Ok(Some(largest_certified_angle(ok, top)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delta_cases() {
        assert_eq!(delta_of(0.0, c(1.0, -1.0)).unwrap(), 1.0);
        assert!(matches!(delta_of(3.0 * PI / 4.0, c(0.0, -1.0)), Err(Error::Degenerate { .. })));
        assert!(delta_of(3.0 * PI / 4.0, c(1.0, -1.0)).unwrap() > 1.0);
    }

    #[test]
    fn general_certificate_examples() {
        let p = AnalyticPotential::InversePowerN { c: -1.0, a: 1.0, n: 2, gamma: 2.0 };
        assert!(certify_general(&p, 0.0, c(3.0, -0.5), 1e-8).unwrap().certified);
        let z = AnalyticPotential::zero();
        assert!(certify_general(&z, 0.3, c(0.1, -0.1), 1e-8).unwrap().certified);
        let p = AnalyticPotential::InversePower { c: 1.0, a: 1.0, gamma: 2.0 };
        let zz = Complex64::from_polar(1.0 / (2.0 * LN_2), -1e-3);
        let v = certify_general(&p, 0.0, zz, 1e-8).unwrap();
        assert!(!v.certified && (v.lhs - 1.0).abs() < 1e-5 && (v.rhs - 0.5).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_certificate_examples() {
        let p = AnalyticPotential::InversePowerN { c: 1.0, a: 1.0, n: 2, gamma: 2.0 };
        let v = certify_dirichlet(&p, c(1.0, -1e-9), 1e-9).unwrap();
        assert!(v.certified && (v.lhs - 0.5).abs() < 1e-8);
        let g2 = AnalyticPotential::InversePower { c: 1.0, a: 1.0, gamma: 2.0 };
        assert!(matches!(certify_dirichlet(&g2, c(1.0, -1.0), 1e-8), Err(Error::GammaTooSmall { .. })));
    }

    #[test]
    fn boundary_of_inverse_square() {
        let p = AnalyticPotential::InversePower { c: 1.0, a: 1.0, gamma: 2.0 };
        let curve = boundary_curve(&p, 0.0, Criterion::General, &[0.5, 1.0, 3.0], 1e-10).unwrap();
        for s in &curve.samples {
            let exact = s.theta / (s.theta.sin() * LN_2);
            assert!((s.radius - exact).abs() < 1e-8);
        }
        // asymptote im z = -pi / log 2
        let last = curve.samples[2].z();
        assert!((last.im + 3.0 / LN_2).abs() < 1e-8);
    }

    #[test]
    fn sectorial_certificates() {
        let p = AnalyticPotential::InversePower { c: 1.0, a: 1.0, gamma: 2.0 };
        let s = sector_certificate(&p, 0.0, 1e-10).unwrap();
        assert!((s.r1 - 1.001 / LN_2).abs() < 1e-8);
        assert!(s.theta1 > 0.0 && s.theta1 < 0.1);
        let z = sector_certificate(&AnalyticPotential::zero(), 0.0, 1e-10).unwrap();
        assert_eq!(z.r1, 0.0);
        assert_eq!(z.theta1, PI);
    }

    #[test]
    fn dirichlet_sector_examples() {
        let p = AnalyticPotential::InversePowerN { c: 1.0, a: 1.0, n: 2, gamma: 2.0 };
        let t1 = dirichlet_sector(&p, 1e-10).unwrap().unwrap();
        let f = 2.0 * t1 / (2.0 * t1).sin();
        assert!((f - 2.0 * LN_2).abs() < 1e-3, "{t1}");
        let p2 = AnalyticPotential::InversePowerN { c: 2.0, a: 1.0, n: 2, gamma: 2.0 };
        assert_eq!(dirichlet_sector(&p2, 1e-10).unwrap(), None);
    }
}
