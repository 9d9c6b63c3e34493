//! Search regions in the lower half-plane and argument-principle zero counts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase jumps above this are refined by bisection.
const REFINE_JUMP: f64 = PI / 4.0;
/// Phase jumps that survive refinement at or above this are fatal.
const FATAL_JUMP: f64 = PI / 2.0;
const MAX_REFINEMENT_ROUNDS: usize = 12;

/// A search region, described as the image of the unit square under an
/// orientation-preserving map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SearchRegion {
    /// `re_range x im_range`.
    Box { re_range: (f64, f64), im_range: (f64, f64) },
    /// `{ r e^{-i theta} : r in radius_range, theta in theta_range }`.
    AnnularSector { radius_range: (f64, f64), theta_range: (f64, f64) },
}

impl SearchRegion {
    pub fn rect(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        SearchRegion::Box { re_range: (re0, re1), im_range: (im0, im1) }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SearchRegion::Box { re_range, im_range } => {
                re_range.0 < re_range.1 && im_range.0 < im_range.1
            }
            SearchRegion::AnnularSector { radius_range, theta_range } => {
                0.0 < radius_range.0
                    && radius_range.0 < radius_range.1
                    && 0.0 <= theta_range.0
                    && theta_range.0 < theta_range.1
                    && theta_range.1 < PI
            }
        };
        if ok && self.corners().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("malformed search region {self:?}")))
        }
    }

    /// Point with unit-square coordinates `(u, v)`.
    pub fn map(&self, u: f64, v: f64) -> Complex64 {
        match *self {
            SearchRegion::Box { re_range: (a, b), im_range: (c, d) } => {
                Complex64::new(a + u * (b - a), c + v * (d - c))
            }
            SearchRegion::AnnularSector { radius_range: (r0, r1), theta_range: (t0, t1) } => {
                // counterclockwise orientation: increasing angle means decreasing theta
                let r = r0 + u * (r1 - r0);
                let theta = t1 - v * (t1 - t0);
                Complex64::from_polar(r, -theta)
            }
        }
    }

    pub fn center(&self) -> Complex64 {
        self.map(0.5, 0.5)
    }

    pub fn corners(&self) -> [Complex64; 4] {
        [self.map(0.0, 0.0), self.map(1.0, 0.0), self.map(1.0, 1.0), self.map(0.0, 1.0)]
    }

    /// Largest distance between two corners (or across the arc).
    pub fn diameter(&self) -> f64 {
        let c = self.corners();
        let mut d: f64 = 0.0;
        for a in &c {
            for b in &c {
                d = d.max((a - b).norm());
            }
        }
        d.max((self.map(0.5, 0.0) - self.map(0.5, 1.0)).norm())
    }

    /// Largest `theta = -arg z` over the region.
    pub fn max_theta(&self) -> f64 {
        match *self {
            SearchRegion::Box { .. } => {
                let pts = [self.map(0.0, 0.0), self.map(1.0, 0.0), self.map(0.0, 1.0), self.map(1.0, 1.0)];
                pts.iter().map(|z| (-z.im).max(0.0).atan2(z.re)).fold(f64::NEG_INFINITY, f64::max)
            }
            SearchRegion::AnnularSector { theta_range, .. } => theta_range.1,
        }
    }

    /// Whether `z` lies in the region enlarged by `slack` in unit-square coordinates.
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        let (u, v) = match *self {
            SearchRegion::Box { re_range: (a, b), im_range: (c, d) } => ((z.re - a) / (b - a), (z.im - c) / (d - c)),
            SearchRegion::AnnularSector { radius_range: (r0, r1), theta_range: (t0, t1) } => {
                ((z.norm() - r0) / (r1 - r0), (t1 + z.arg()) / (t1 - t0))
            }
        };
        (-slack..=1.0 + slack).contains(&u) && (-slack..=1.0 + slack).contains(&v)
    }

    /// The four quadrants in unit-square coordinates.
    pub fn subdivide(&self) -> [SearchRegion; 4] {
        let split = |(a, b): (f64, f64)| [(a, 0.5 * (a + b)), (0.5 * (a + b), b)];
        match *self {
            SearchRegion::Box { re_range, im_range } => {
                let [r0, r1] = split(re_range);
                let [i0, i1] = split(im_range);
                [
                    SearchRegion::Box { re_range: r0, im_range: i0 },
                    SearchRegion::Box { re_range: r1, im_range: i0 },
                    SearchRegion::Box { re_range: r0, im_range: i1 },
                    SearchRegion::Box { re_range: r1, im_range: i1 },
                ]
            }
            SearchRegion::AnnularSector { radius_range, theta_range } => {
                let [r0, r1] = split(radius_range);
                let [t0, t1] = split(theta_range);
                [
                    SearchRegion::AnnularSector { radius_range: r0, theta_range: t0 },
                    SearchRegion::AnnularSector { radius_range: r1, theta_range: t0 },
                    SearchRegion::AnnularSector { radius_range: r0, theta_range: t1 },
                    SearchRegion::AnnularSector { radius_range: r1, theta_range: t1 },
                ]
            }
        }
    }

    /// Slightly enlarged copy, used to move the contour off a zero.
    pub fn jittered(&self, k: usize) -> SearchRegion {
        let f = 1e-3 * (k as f64) * if k % 2 == 0 { -1.0 } else { 1.0 };
        let grow = |(a, b): (f64, f64)| {
            let w = b - a;
            (a - f * w * 0.7, b + f * w * 1.3)
        };
        match *self {
            SearchRegion::Box { re_range, im_range } => {
                let im = grow(im_range);
                SearchRegion::Box { re_range: grow(re_range), im_range: (im.0, im.1.min(0.0)) }
            }
            SearchRegion::AnnularSector { radius_range, theta_range } => {
                let t = grow(theta_range);
                SearchRegion::AnnularSector {
                    radius_range: grow(radius_range),
                    theta_range: (t.0.max(0.0), t.1.min(PI - 1e-9)),
                }
            }
        }
    }

    /// Point at boundary parameter `s` in `[0, 4)`, counterclockwise.
    pub fn boundary_point(&self, s: f64) -> Complex64 {
        let edge = (s.floor() as usize).min(3);
        let t = s - edge as f64;
        match edge {
            0 => self.map(t, 0.0),
            1 => self.map(1.0, t),
            2 => self.map(1.0 - t, 1.0),
            _ => self.map(0.0, 1.0 - t),
        }
    }
}

fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

/// Winding number of `f` around the boundary of `region`, with adaptive
/// bisection of boundary intervals whose phase change exceeds `pi/4`.
pub fn winding_count<F>(f: &F, region: &SearchRegion, samples_per_edge: usize) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    region.validate()?;
    let n = 4 * samples_per_edge.max(2);
    let mut s: Vec<f64> = (0..=n).map(|k| 4.0 * k as f64 / n as f64).collect();
    let eval = |pts: &[f64]| -> Result<Vec<Complex64>> {
        pts.par_iter().map(|&t| f(region.boundary_point(t % 4.0))).collect()
    };
    let mut vals = eval(&s)?;
    for _ in 0..MAX_REFINEMENT_ROUNDS {
        let bad: Vec<usize> = (0..s.len() - 1)
            .filter(|&k| phase_step(vals[k], vals[k + 1]).abs() > REFINE_JUMP)
            .collect();
        if bad.is_empty() {
            break;
        }
        let mids: Vec<f64> = bad.iter().map(|&k| 0.5 * (s[k] + s[k + 1])).collect();
        let mid_vals = eval(&mids)?;
        let mut s2 = Vec::with_capacity(s.len() + mids.len());
        let mut v2 = Vec::with_capacity(s.len() + mids.len());
        let mut j = 0;
        for k in 0..s.len() {
            s2.push(s[k]);
            v2.push(vals[k]);
            if j < bad.len() && bad[j] == k {
                s2.push(mids[j]);
                v2.push(mid_vals[j]);
                j += 1;
            }
        }
        s = s2;
        vals = v2;
    }
    let mut total = 0.0;
    let mut worst: f64 = 0.0;
    for k in 0..s.len() - 1 {
        let d = phase_step(vals[k], vals[k + 1]);
        worst = worst.max(d.abs());
        total += d;
    }
    if worst >= FATAL_JUMP {
        return Err(Error::ContourTooCoarse { jump: worst });
    }
    Ok((total / (2.0 * PI)).round() as i64)
}
