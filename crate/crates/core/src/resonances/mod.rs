//! Resonances as zeros of the continued `Psi(z)`, located by complex-scaled
//! shooting, argument-principle subdivision and Newton polishing.

pub mod scaling;
mod track;
pub mod winding;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{volterra_solve, JostOptions};
use crate::potentials::AnalyticPotential;
use crate::regions::certify_general;

pub use scaling::{shoot_determinant, Leg, ScalingConfig, Shooter};
pub use track::{track_resonance, Track, TrackOptions};
pub use winding::{winding_count, SearchRegion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceMethod {
    Shooting,
    SeriesZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    #[serde(with = "crate::potentials::point_serde")]
    pub z: Complex64,
    #[serde(with = "crate::potentials::point_serde")]
    pub lambda: Complex64,
    /// Size of the last Newton correction, an estimate of the distance to the zero.
    pub residual: f64,
    pub method: ResonanceMethod,
    /// Scaling configuration (shooting only), with the path leg actually used.
    pub config: Option<ScalingConfig>,
    pub potential: AnalyticPotential,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    /// Required residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Secant step relative to `|z|`.
    pub relative_step: f64,
    /// Cap on a single correction relative to `|z|`.
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-8, max_iter: 40, relative_step: 1e-6, max_step: 0.25 }
    }
}

/// Newton iteration with a forward-difference derivative.
/// Returns the zero and the size of the last correction.
pub fn newton<F>(f: &F, z0: Complex64, opts: &NewtonOptions) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut z = z0;
    for _ in 0..opts.max_iter {
        let fz = f(z)?;
        if fz == Complex64::new(0.0, 0.0) {
            return Ok((z, 0.0));
        }
        let h = opts.relative_step * z.norm().max(1e-3);
        let df = (f(z + h)? - fz) / h;
        if df.norm() == 0.0 || !df.re.is_finite() || !df.im.is_finite() {
            return Err(Error::NoConvergence(format!("vanishing derivative at {z}")));
        }
        let mut step = fz / df;
        let cap = opts.max_step * z.norm().max(0.1);
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        // stop once the correction is well below the tolerance
        if step.norm() < 1e-2 * opts.tol * z.norm().max(1.0) {
            return Ok((z, step.norm()));
        }
    }
    let fz = f(z)?;
    let h = opts.relative_step * z.norm().max(1e-3);
    let df = (f(z + h)? - fz) / h;
    let residual = (fz / df).norm();
    if residual < opts.tol {
        Ok((z, residual))
    } else {
        Err(Error::NoConvergence(format!("residual {residual:e} at {z} after {} iterations", opts.max_iter)))
    }
}

impl Shooter {
    /// Newton polish of a zero of the shooting determinant.
    pub fn polish(&self, z0: Complex64, opts: &NewtonOptions) -> Result<Resonance> {
        let (z, residual) = newton(&|z| self.determinant(z), z0, opts)?;
        if self.decay_rate(z) <= 0.0 || z.im >= 0.0 {
            return Err(Error::NoConvergence(format!("Newton left the scaled sector at {z}")));
        }
        let mut cfg = self.cfg;
        cfg.leg = Some(self.leg_for(z).0);
        Ok(Resonance {
            z,
            lambda: z * z,
            residual,
            method: ResonanceMethod::Shooting,
            config: Some(cfg),
            potential: self.pot.clone(),
            alpha: self.alpha,
        })
    }
}

/// Newton polish on `Psi` from the continued Jost function (Volterra form).
pub fn series_zero_polish(
    pot: &AnalyticPotential,
    alpha: f64,
    z0: Complex64,
    jost: &JostOptions,
    newton_opts: &NewtonOptions,
) -> Result<Resonance> {
    if pot.is_identically_zero() {
        return Err(Error::NoConvergence("the free problem has no resonances".into()));
    }
    let f = |z: Complex64| volterra_solve(pot, z, alpha, jost).map(|r| r.big_psi);
    let (z, residual) = newton(&f, z0, newton_opts)?;
    if z.im >= 0.0 {
        return Err(Error::NoConvergence(format!("Newton left the lower half-plane at {z}")));
    }
    Ok(Resonance {
        z,
        lambda: z * z,
        residual,
        method: ResonanceMethod::SeriesZero,
        config: None,
        potential: pot.clone(),
        alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    pub samples_per_edge: usize,
    pub max_depth: usize,
    pub newton: NewtonOptions,
    /// Tolerance of the certificate cross-check.
    pub certificate_tol: f64,
    /// Results closer than this are merged.
    pub dedup_distance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            samples_per_edge: 16,
            max_depth: 8,
            newton: NewtonOptions::default(),
            certificate_tol: 1e-8,
            dedup_distance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub resonances: Vec<Resonance>,
    /// Winding number of the whole region.
    pub count: i64,
    /// Sub-regions that could not be resolved, with the reason.
    pub unresolved: Vec<(SearchRegion, String)>,
    /// Zeros rejected because the non-resonance certificate holds there.
    pub rejected: Vec<(Resonance, String)>,
}

fn count_with_jitter(sh: &Shooter, region: &SearchRegion, opts: &SearchOptions) -> Result<(SearchRegion, i64)> {
    let f = |z: Complex64| sh.determinant(z);
    let mut last = None;
    for k in 0..4 {
        let r = if k == 0 { *region } else { region.jittered(k) };
        match winding_count(&f, &r, opts.samples_per_edge) {
            Ok(n) => return Ok((r, n)),
            Err(e @ Error::ContourTooCoarse { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::ContourTooCoarse { jump: f64::NAN }))
}

struct Found {
    resonances: Vec<Resonance>,
    unresolved: Vec<(SearchRegion, String)>,
}

fn search(sh: &Shooter, region: SearchRegion, count: i64, depth: usize, opts: &SearchOptions) -> Found {
    if count == 0 {
        return Found { resonances: vec![], unresolved: vec![] };
    }
    if count < 0 {
        return Found { resonances: vec![], unresolved: vec![(region, format!("negative winding number {count}"))] };
    }
    if count == 1 {
        if let Ok(res) = sh.polish(region.center(), &opts.newton) {
            if region.contains(res.z, 1e-6) {
                return Found { resonances: vec![res], unresolved: vec![] };
            }
        }
    }
    if depth >= opts.max_depth {
        return Found { resonances: vec![], unresolved: vec![(region, Error::MaxDepth { depth }.to_string())] };
    }
    let children: Vec<Found> = region
        .subdivide()
        .par_iter()
        .map(|child| match count_with_jitter(sh, child, opts) {
            Ok((r, n)) => search(sh, r, n, depth + 1, opts),
            Err(e) => Found { resonances: vec![], unresolved: vec![(*child, e.to_string())] },
        })
        .collect();
    let mut out = Found { resonances: vec![], unresolved: vec![] };
    for c in children {
        out.resonances.extend(c.resonances);
        out.unresolved.extend(c.unresolved);
    }
    out
}

/// All zeros of `Psi` inside `region` for the scaled problem with `cfg`.
pub fn find_resonances(
    pot: &AnalyticPotential,
    alpha: f64,
    cfg: &ScalingConfig,
    region: &SearchRegion,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    region.validate()?;
    if region.corners().iter().any(|z| z.im > 0.0) {
        return Err(Error::InvalidParameter(format!("search region {region:?} leaves the lower half-plane")));
    }
    if region.max_theta() >= cfg.phi {
        return Err(Error::InvalidParameter(format!(
            "region reaches theta = {} but the scaling angle is {}",
            region.max_theta(),
            cfg.phi
        )));
    }
    let sh = Shooter::new(pot, alpha, cfg)?;
    let (r, count) = count_with_jitter(&sh, region, opts)?;
    let found = search(&sh, r, count, 0, opts);
    let mut resonances: Vec<Resonance> = Vec::new();
    for res in found.resonances {
        if !resonances.iter().any(|o| (o.z - res.z).norm() < opts.dedup_distance) {
            resonances.push(res);
        }
    }
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for res in resonances {
        match certify_general(pot, alpha, res.z, opts.certificate_tol) {
            Ok(v) if v.certified => rejected.push((res, format!("certified free: {} < {}", v.lhs, v.rhs))),
            _ => kept.push(res),
        }
    }
    kept.sort_by(|a, b| a.z.norm().total_cmp(&b.z.norm()));
    Ok(SearchReport { resonances: kept, count, unresolved: found.unresolved, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_on_polynomial() {
        let z0 = Complex64::new(0.3, -0.7);
        let (z, r) = newton(&|z| Ok((z - z0) * (z + 2.0)), Complex64::new(0.5, -0.5), &NewtonOptions::default()).unwrap();
        assert!((z - z0).norm() < 1e-10 && r < 1e-8);
    }

    #[test]
    fn free_problem_has_no_resonances() {
        let pot = AnalyticPotential::zero();
        let region = SearchRegion::rect(0.1, 2.0, -1.0, -0.05);
        let rep = find_resonances(&pot, 0.0, &ScalingConfig::with_phi(1.5), &region, &SearchOptions::default()).unwrap();
        assert_eq!(rep.count, 0);
        assert!(rep.resonances.is_empty());
        assert!(series_zero_polish(&pot, 0.0, Complex64::new(1.0, -1.0), &JostOptions::default(), &NewtonOptions::default()).is_err());
    }
}
