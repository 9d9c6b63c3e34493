//! Complex-scaled shooting. The equation `psi'' = (q - z^2) psi` is integrated
//! along a two-leg path: a first leg `t e^{i beta}`, `0 <= t <= rho`, followed
//! by the scaled ray `rho e^{i beta} + t e^{i phi}`, `0 <= t <= R`.
//! The regular solution with data `(sin a, -cos a)` at 0 and the outgoing
//! solution normalized like `e^{i z xi}` at the far end are matched by their
//! Wronskian, which equals `Psi(z)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::potentials::{AnalyticPotential, DEFAULT_SECTOR_MARGIN};
use crate::quadrature;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Smallest admissible gap between the scaling angle and the sector edge.
pub const DEFAULT_PHI_MARGIN: f64 = 0.02;
/// Clearance between the path and the singularities of `q` that is accepted
/// without searching further.
pub const PATH_CLEARANCE: f64 = 0.6;
/// Bound on the first neglected Liouville-Green term at the end of the ray.
const FAR_FIELD_TOL: f64 = 1e-8;
/// Outgoing solutions are required to decay by `e^{-DECAY_LENGTHS}` over the ray.
const DECAY_LENGTHS: f64 = 20.0;
const MAX_RADIUS: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingConfig {
    /// Scaling angle.
    pub phi: f64,
    /// Least truncation length of the scaled ray (raised automatically for
    /// slowly decaying outgoing solutions).
    #[serde(rename = "R")]
    pub r: f64,
    /// Step cap `path length / mesh_points`; 0 leaves the step to error control.
    pub mesh_points: usize,
    /// Path parameter at which the two solutions are matched.
    pub match_point: Option<f64>,
    /// First leg of the path (chosen per `z` if absent).
    pub leg: Option<Leg>,
    /// Relative tolerance of the integrator.
    pub rtol: f64,
    /// Smallest admissible `theta0 - phi`.
    pub phi_margin: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            phi: 0.5,
            r: 60.0,
            mesh_points: 0,
            match_point: None,
            leg: None,
            rtol: 1e-10,
            phi_margin: DEFAULT_PHI_MARGIN,
        }
    }
}

impl ScalingConfig {
    pub fn with_phi(phi: f64) -> Self {
        ScalingConfig { phi, ..Default::default() }
    }
}

/// First leg `t e^{i angle}`, `0 <= t <= length`, of the integration path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub angle: f64,
    pub length: f64,
}

impl Leg {
    pub const STRAIGHT: Leg = Leg { angle: 0.0, length: 0.0 };

    fn end(&self) -> Complex64 {
        Complex64::from_polar(self.length, self.angle)
    }
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    if d.norm_sqr() == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

fn ray_distance(origin: Complex64, dir: Complex64, p: Complex64) -> f64 {
    let t = ((p - origin) * dir.conj()).re.max(0.0);
    (origin + dir * t - p).norm()
}

/// Winding number of the closed curve formed by `[0, M]`, the arc of radius
/// `M` up to the scaled ray, and the path traversed back to 0, around `s`.
fn encloses(leg: &Leg, phi: f64, s: Complex64) -> bool {
    let p = leg.end();
    let dir = Complex64::from_polar(1.0, phi);
    let big = 1e3 * (1.0 + s.norm() + leg.length);
    let tail = p + dir * big;
    let mut pts: Vec<Complex64> = Vec::new();
    let n = 2000;
    for k in 0..=n {
        pts.push(Complex64::new(big * k as f64 / n as f64, 0.0));
    }
    let (a0, a1) = (0.0, tail.arg());
    for k in 1..=n {
        pts.push(Complex64::from_polar(big, a0 + (a1 - a0) * k as f64 / n as f64));
    }
    pts.push(tail);
    for k in 1..=n {
        pts.push(tail + (p - tail) * (k as f64 / n as f64));
    }
    for k in 1..=n {
        pts.push(p * (1.0 - k as f64 / n as f64));
    }
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += ((w[1] - s) / (w[0] - s)).arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() != 0.0
}

/// Clearance of the path from the singularities of `q`, or `None` when a
/// singularity lies between the path and the real axis.
pub fn path_clearance(pot: &AnalyticPotential, phi: f64, leg: &Leg) -> Option<f64> {
    let p = leg.end();
    let dir = Complex64::from_polar(1.0, phi);
    let mut clear = f64::INFINITY;
    for s in pot.singularities() {
        if s.im > 0.0 && encloses(leg, phi, s) {
            return None;
        }
        clear = clear.min(segment_distance(Complex64::new(0.0, 0.0), p, s)).min(ray_distance(p, dir, s));
    }
    Some(clear)
}

/// Growth exponent `2 int sqrt|q|` accumulated along the path; it bounds the
/// amplification of local integration errors near singularities.
fn stiffness(pot: &AnalyticPotential, phi: f64, leg: &Leg) -> f64 {
    let h = 0.01;
    let len = leg.length + 40.0;
    let n = (len / h).ceil() as usize;
    let p = leg.end();
    let dir = Complex64::from_polar(1.0, phi);
    let d1 = Complex64::from_polar(1.0, leg.angle);
    let mut sum = 0.0;
    for k in 0..n {
        let r = (k as f64 + 0.5) * h;
        let xi = if r <= leg.length { d1 * r } else { p + dir * (r - leg.length) };
        sum += pot.value(xi).norm().sqrt() * h;
    }
    2.0 * sum
}

/// Admissible first legs with their clearance and stiffness.
pub fn candidate_legs(pot: &AnalyticPotential, phi: f64) -> Vec<(Leg, f64, f64)> {
    if pot.singularities().is_empty() {
        return vec![(Leg::STRAIGHT, f64::INFINITY, 0.0)];
    }
    let mut out = Vec::new();
    for k in 0..=8 {
        let angle = phi * k as f64 / 8.0;
        let lengths: &[f64] = if k == 8 { &[0.0] } else { &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0] };
        for &length in lengths {
            let leg = Leg { angle, length };
            if let Some(c) = path_clearance(pot, phi, &leg) {
                out.push((leg, c, 0.0));
            }
        }
    }
    let best = out.iter().map(|l| l.1).fold(0.0, f64::max);
    out.retain(|l| l.1 >= PATH_CLEARANCE.min(0.5 * best));
    for l in out.iter_mut() {
        l.2 = stiffness(pot, phi, &l.0);
    }
    out
}

/// Exponent of the cancellation incurred on a first leg along which the
/// outgoing solution is dominant.
fn cancellation(leg: &Leg, z: Complex64) -> f64 {
    let theta = -z.arg();
    2.0 * z.norm() * leg.length * (theta - leg.angle).sin().max(0.0)
}

/// Shooting evaluator of `Psi(z)` for a fixed potential, boundary angle and path.
#[derive(Debug, Clone)]
pub struct Shooter {
    pub pot: AnalyticPotential,
    pub alpha: f64,
    pub cfg: ScalingConfig,
    legs: Vec<(Leg, f64, f64)>,
}

impl Shooter {
    pub fn new(pot: &AnalyticPotential, alpha: f64, cfg: &ScalingConfig) -> Result<Shooter> {
        pot.validate()?;
        let top = pot.max_ray_angle(DEFAULT_SECTOR_MARGIN);
        if !(cfg.phi > 0.0 && cfg.phi <= top - cfg.phi_margin) {
            return Err(Error::InvalidParameter(format!(
                "phi = {} must lie in (0, {}] (sector {} less margin {})",
                cfg.phi,
                top - cfg.phi_margin,
                pot.sector(),
                cfg.phi_margin
            )));
        }
        if !(cfg.r > 0.0 && cfg.rtol > 0.0) {
            return Err(Error::InvalidParameter("R and rtol must be positive".into()));
        }
        if !(0.0..std::f64::consts::PI).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} is outside [0, pi)")));
        }
        let legs = match cfg.leg {
            Some(leg) => {
                if !(leg.length >= 0.0 && leg.angle >= 0.0 && leg.angle < std::f64::consts::PI) {
                    return Err(Error::InvalidParameter(format!("malformed path leg {leg:?}")));
                }
                match path_clearance(pot, cfg.phi, &leg) {
                    Some(c) => vec![(leg, c, 0.0)],
                    None => {
                        return Err(Error::InvalidParameter(format!("path leg {leg:?} passes a singularity")))
                    }
                }
            }
            None => candidate_legs(pot, cfg.phi),
        };
        if legs.is_empty() {
            return Err(Error::InvalidParameter("no admissible integration path".into()));
        }
        Ok(Shooter { pot: pot.clone(), alpha, cfg: *cfg, legs })
    }

    /// Path leg used at `z` (with its clearance): least cancellation plus
    /// stiffness, then shortest.
    pub fn leg_for(&self, z: Complex64) -> (Leg, f64) {
        let cost = |l: &(Leg, f64, f64)| cancellation(&l.0, z) + l.2;
        let mut best = &self.legs[0];
        for cand in &self.legs[1..] {
            let (a, b) = (cost(cand), cost(best));
            if a < b - 1e-9 || ((a - b).abs() <= 1e-9 && cand.0.length < best.0.length) {
                best = cand;
            }
        }
        (best.0, best.1)
    }

    /// Decay rate `im(z e^{i phi})` of the outgoing solution along the ray.
    pub fn decay_rate(&self, z: Complex64) -> f64 {
        (z * Complex64::from_polar(1.0, self.cfg.phi)).im
    }

    /// Truncation length of the scaled ray used at `z`: long enough for the
    /// outgoing solution to decay and for the far-field data to be accurate.
    pub fn radius_for(&self, z: Complex64) -> f64 {
        self.radius_on(&self.leg_for(z).0, z)
    }

    fn radius_on(&self, leg: &Leg, z: Complex64) -> f64 {
        let k = self.decay_rate(z);
        let mut r = self.cfg.r.max(DECAY_LENGTHS / k).min(MAX_RADIUS);
        let d = Complex64::from_polar(1.0, self.cfg.phi);
        while r < MAX_RADIUS {
            let xi = leg.end() + d * r;
            let h = 1e-3 * r;
            let dq = (self.pot.value(xi + d * h) - self.pot.value(xi - d * h)) / (2.0 * h);
            let kk = z * (1.0 - self.pot.value(xi) / (z * z)).sqrt();
            if dq.norm() / kk.norm().powi(3) < FAR_FIELD_TOL {
                break;
            }
            r = (1.5 * r).min(MAX_RADIUS);
        }
        r
    }

    fn xi(&self, leg: &Leg, r: f64) -> (Complex64, Complex64) {
        if r <= leg.length {
            let d = Complex64::from_polar(1.0, leg.angle);
            (d * r, d)
        } else {
            let d = Complex64::from_polar(1.0, self.cfg.phi);
            (leg.end() + d * (r - leg.length), d)
        }
    }

    /// Liouville-Green data at the end of the ray: `(log scale, psi_xi / psi)`.
    fn outgoing_data(&self, z: Complex64, xi_end: Complex64, radius: f64) -> Result<(Complex64, Complex64)> {
        let d = Complex64::from_polar(1.0, self.cfg.phi);
        let q = |xi: Complex64| self.pot.value(xi);
        let k_of = |xi: Complex64| z * (1.0 - q(xi) / (z * z)).sqrt();
        let g = |x: f64| -> Complex64 {
            if x <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let s = radius * (1.0 - x) / x;
            let xi = xi_end + d * s;
            let v = -q(xi) / (k_of(xi) + z) * (radius / (x * x));
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let breaks: Vec<f64> = std::iter::once(0.0).chain((0..=30).rev().map(|k| 0.5f64.powi(k))).collect();
        let phase = d * quadrature::integrate(g, &breaks, 1e-3 * self.cfg.rtol, 50_000)?.value;
        let k = k_of(xi_end);
        let h = 1e-3 * radius;
        let dq = (q(xi_end + d * h) - q(xi_end - d * h)) / (d * (2.0 * h));
        let log_scale = I * z * xi_end - I * phase + 0.5 * (z / k).ln();
        Ok((log_scale, I * k + dq / (4.0 * k * k)))
    }

    #[allow(clippy::too_many_arguments)]
    fn integrate(
        &self,
        leg: &Leg,
        clearance: f64,
        z: Complex64,
        y0: [Complex64; 2],
        r0: f64,
        r1: f64,
        total: f64,
    ) -> Result<([Complex64; 2], f64)> {
        let z2 = z * z;
        let h_max = (0.25 * clearance.min(1.0)).max(0.02);
        let rhs = |r: f64, y: &[Complex64; 2]| {
            let (xi, dxi) = self.xi(leg, r);
            [dxi * y[1], dxi * (self.pot.value(xi) - z2) * y[0]]
        };
        let h_cap = if self.cfg.mesh_points > 0 { total / self.cfg.mesh_points as f64 } else { f64::INFINITY };
        let stepper = Dopri5 {
            rtol: self.cfg.rtol,
            atol: 1e-3 * self.cfg.rtol,
            h_max: h_max.max(2.0 / z.norm().max(1e-3)).min(h_cap).min(h_max * 40.0),
            max_steps: 5_000_000,
        };
        let mut log = 0.0;
        let (y, _) = stepper.solve(rhs, r0, y0, r1, |_, y| {
            let m = y[0].norm().max(y[1].norm());
            if !(1e-8..=1e8).contains(&m) && m > 0.0 {
                y[0] /= m;
                y[1] /= m;
                log += m.ln();
            }
        })?;
        Ok((y, log))
    }

    /// `Psi(z)` computed by matching; requires `-phi < arg z < pi - phi`.
    pub fn determinant(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("invalid z = {z}")));
        }
        if self.decay_rate(z) <= 0.0 {
            return Err(Error::OutOfContinuationSector { z, theta: -z.arg(), theta0: self.cfg.phi });
        }
        let (leg, clearance) = self.leg_for(z);
        let radius = self.radius_on(&leg, z);
        let total = leg.length + radius;
        let r_match = match self.cfg.match_point {
            Some(m) if m > 0.0 && m < total => m,
            Some(m) => return Err(Error::InvalidParameter(format!("match point {m} outside (0, {total})"))),
            None => {
                if leg.length > 0.0 {
                    leg.length
                } else {
                    1.0f64.min(0.5 * total)
                }
            }
        };
        let (xi_end, _) = self.xi(&leg, total);
        let (log_r0, ratio) = self.outgoing_data(z, xi_end, radius)?;
        let left0 = [Complex64::new(self.alpha.sin(), 0.0), Complex64::new(-self.alpha.cos(), 0.0)];
        let (left, log_l) = self.integrate(&leg, clearance, z, left0, 0.0, r_match, total)?;
        let (right, log_r) = self.integrate(&leg, clearance, z, [Complex64::new(1.0, 0.0), ratio], total, r_match, total)?;
        let w = left[0] * right[1] - left[1] * right[0];
        let log_total = log_r0 + log_l + log_r;
        let log_mag = w.norm().ln() + log_total.re;
        if log_mag > 700.0 {
            return Err(Error::Overflow { log_magnitude: log_mag });
        }
        Ok(w * log_total.exp())
    }
}

/// One-shot evaluation of `Psi(z)` by complex-scaled shooting.
pub fn shoot_determinant(pot: &AnalyticPotential, alpha: f64, cfg: &ScalingConfig, z: Complex64) -> Result<Complex64> {
    Shooter::new(pot, alpha, cfg)?.determinant(z)
}
