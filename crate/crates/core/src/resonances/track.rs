//! Continuation of a resonance in the strength parameter `c`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::AnalyticPotential;

use super::{NewtonOptions, Resonance, ScalingConfig, Shooter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackOptions {
    pub newton: NewtonOptions,
    /// The track stops once `-arg z` comes within this margin of the scaling angle.
    pub sector_margin: f64,
    /// Smallest parameter sub-step, relative to the requested step.
    pub min_relative_step: f64,
    /// Accepted deviation from the predictor: `max(jump_ratio |dz_pred|, jump_floor)`.
    pub jump_ratio: f64,
    pub jump_floor: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            newton: NewtonOptions::default(),
            sector_margin: 0.02,
            min_relative_step: 1e-4,
            jump_ratio: 0.3,
            jump_floor: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    /// Polished resonances at the requested parameters reached.
    pub points: Vec<(f64, Resonance)>,
    /// Why the track ended early, if it did.
    pub stopped: Option<Error>,
}

/// Follows a resonance along `params` starting from `seed` at `params[0]`.
pub fn track_resonance(
    family: &AnalyticPotential,
    params: &[f64],
    alpha: f64,
    cfg: &ScalingConfig,
    seed: Complex64,
    opts: &TrackOptions,
) -> Result<Track> {
    let Some(&c0) = params.first() else {
        return Ok(Track { points: vec![], stopped: None });
    };
    let shooter_at = |c: f64| -> Result<Shooter> { Shooter::new(&family.with_strength(c)?, alpha, cfg) };
    let first = shooter_at(c0)?.polish(seed, &opts.newton)?;
    let limit = cfg.phi - opts.sector_margin;
    let mut points = vec![(c0, first.clone())];
    // last two accepted (c, z) pairs, for the secant predictor
    let mut prev: Option<(f64, Complex64)> = None;
    let mut cur = (c0, first.z);
    for &target in &params[1..] {
        let full = target - cur.0;
        if full == 0.0 {
            let same = points.last().expect("track starts with the seed").1.clone();
            points.push((target, same));
            continue;
        }
        let mut step = full;
        let mut reached = None;
        while reached.is_none() {
            if step.abs() < opts.min_relative_step * full.abs().max(1e-12) {
                return Ok(Track { points, stopped: Some(Error::TrackLost { last_param: cur.0, last_z: cur.1 }) });
            }
            let c_next = if (cur.0 + step - target) * step.signum() > 0.0 { target } else { cur.0 + step };
            let dc = c_next - cur.0;
            let pred = match prev {
                Some((pc, pz)) if pc != cur.0 => cur.1 + (cur.1 - pz) * (dc / (cur.0 - pc)),
                _ => cur.1,
            };
            let accepted = shooter_at(c_next).and_then(|sh| sh.polish(pred, &opts.newton)).ok().filter(|r| {
                let allowed = (opts.jump_ratio * (pred - cur.1).norm()).max(opts.jump_floor);
                (r.z - pred).norm() <= allowed
            });
            match accepted {
                Some(res) => {
                    if -res.z.arg() >= limit {
                        return Ok(Track {
                            points,
                            stopped: Some(Error::TrackLost { last_param: cur.0, last_z: cur.1 }),
                        });
                    }
                    prev = Some(cur);
                    cur = (c_next, res.z);
                    if c_next == target {
                        reached = Some(res);
                    } else {
                        step = (2.0 * step).clamp(-full.abs(), full.abs());
                    }
                }
                None => step *= 0.5,
            }
        }
        points.push((target, reached.expect("loop exits with a value")));
    }
    Ok(Track { points, stopped: None })
}
