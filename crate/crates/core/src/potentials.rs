//! Analytic potential families, their sectors of regularity, decay constants
//! and the weighted ray integrals `int_0^inf t^w |q(t e^{-i theta})| dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::quadrature;

pub type ComplexPoint = Complex64;

/// Margin kept from the edge of an open sector (Ex. exp-sine, Gaussian monomial).
pub const DEFAULT_SECTOR_MARGIN: f64 = 1e-3;

/// Rays passing closer than this to a singularity of `q` are flagged.
pub const NEAR_SINGULAR_FLOOR: f64 = 0.05;

const K_SAFETY: f64 = 1.25;

/// Serialize a complex number as `{ "re": .., "im": .. }`.
pub mod point_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Point {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Point { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Point::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

/// `(xi - root)^power` in the numerator of a rational potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumeratorFactor {
    pub root: f64,
    pub power: u32,
}

/// Denominator factor of a rational potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DenominatorFactor {
    /// `(xi + a)^power`, a > 0
    Linear { a: f64, power: u32 },
    /// `(xi^n + a^n)^power`, a > 0
    Binomial { n: u32, a: f64, power: u32 },
}

impl DenominatorFactor {
    fn value(&self, xi: Complex64) -> Complex64 {
        match *self {
            DenominatorFactor::Linear { a, power } => (xi + a).powu(power),
            DenominatorFactor::Binomial { n, a, power } => (xi.powu(n) + a.powi(n as i32)).powu(power),
        }
    }

    fn degree(&self) -> u32 {
        match *self {
            DenominatorFactor::Linear { power, .. } => power,
            DenominatorFactor::Binomial { n, power, .. } => n * power,
        }
    }

    fn sector(&self) -> f64 {
        match *self {
            DenominatorFactor::Linear { .. } => PI,
            DenominatorFactor::Binomial { n, .. } => PI / n as f64,
        }
    }

    fn roots(&self) -> Vec<Complex64> {
        match *self {
            DenominatorFactor::Linear { a, .. } => vec![Complex64::new(-a, 0.0)],
            DenominatorFactor::Binomial { n, a, .. } => binomial_roots(n, a),
        }
    }
}

fn binomial_roots(n: u32, a: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(a, PI * (2 * k + 1) as f64 / n as f64))
        .collect()
}

/// A real potential with an analytic extension into a sector `|arg xi| < theta0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AnalyticPotential {
    /// `c (x + a)^(-gamma)`
    InversePower { c: f64, a: f64, gamma: f64 },
    /// `c (x^n + a^n)^(-gamma)`
    InversePowerN { c: f64, a: f64, n: u32, gamma: f64 },
    /// `c {(x - w)(x - conj w)}^(-gamma)`
    ConjugatePair {
        c: f64,
        #[serde(with = "point_serde")]
        w: Complex64,
        gamma: f64,
    },
    /// `c prod (x - r_i)^p_i / prod d_j(x)`
    RationalProduct { c: f64, numerator: Vec<NumeratorFactor>, denominator: Vec<DenominatorFactor> },
    /// `2 e^(-a x) sin x`
    ExpSine { a: f64 },
    /// `c x^m exp(-(x/scale)^n)`
    GaussianMonomial {
        c: f64,
        m: u32,
        n: u32,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
}

fn unit_scale() -> f64 {
    1.0
}

/// Constants `(gamma, k)` with `|q(xi)| <= k |xi|^-gamma` for `|xi| >= xi_check` in the sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub gamma: f64,
    pub k: f64,
    pub xi_check: f64,
}

/// `int_0^inf t^weight |q(t e^{-i theta})| dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayIntegral {
    pub theta: f64,
    pub weight: u32,
    pub value: f64,
    pub abs_err: f64,
    /// Truncation point of the numerical integral.
    pub cutoff: f64,
    /// Distance from the ray to the nearest singularity of `q`.
    pub singular_distance: f64,
    /// Set when `singular_distance` is below [`NEAR_SINGULAR_FLOOR`].
    pub near_singular: bool,
}

/// Closed-form ray integral, or a closed-form upper bound where only that is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Exact(f64),
    UpperBound(f64),
}

impl ClosedForm {
    pub fn value(self) -> f64 {
        match self {
            ClosedForm::Exact(v) | ClosedForm::UpperBound(v) => v,
        }
    }
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 1e6
}

/// Power `u^(-gamma)` with the principal branch.
fn inv_pow(u: Complex64, gamma: f64) -> Complex64 {
    if is_integer(gamma) {
        u.powi(-(gamma as i32))
    } else {
        (-gamma * u.ln()).exp()
    }
}

/// `u^(-gamma)` with the branch cut of the logarithm placed along `direction`
/// (a unit vector): the cut is `{ t * direction : t >= 0 }` in the u-plane.
fn inv_pow_cut(u: Complex64, gamma: f64, direction: Complex64) -> Complex64 {
    if is_integer(gamma) {
        return u.powi(-(gamma as i32));
    }
    let minus_d = -direction;
    let arg = (u * minus_d.conj()).arg() + minus_d.arg();
    let log = Complex64::new(u.norm().ln(), arg);
    (-gamma * log).exp()
}

impl AnalyticPotential {
    /// `c (x - 1)/(x + 1)^4`
    pub fn shifted_pole_rational(c: f64) -> Self {
        AnalyticPotential::RationalProduct {
            c,
            numerator: vec![NumeratorFactor { root: 1.0, power: 1 }],
            denominator: vec![DenominatorFactor::Linear { a: 1.0, power: 4 }],
        }
    }

    /// `c (x - 1)/(x^4 + 1)`
    pub fn quartic_binomial_rational(c: f64) -> Self {
        AnalyticPotential::RationalProduct {
            c,
            numerator: vec![NumeratorFactor { root: 1.0, power: 1 }],
            denominator: vec![DenominatorFactor::Binomial { n: 4, a: 1.0, power: 1 }],
        }
    }

    /// The identically vanishing potential (any family with c = 0).
    pub fn zero() -> Self {
        AnalyticPotential::InversePower { c: 0.0, a: 1.0, gamma: 2.0 }
    }

    /// Strength parameter `c` (2 for the exp-sine family).
    pub fn strength(&self) -> f64 {
        match *self {
            AnalyticPotential::InversePower { c, .. }
            | AnalyticPotential::InversePowerN { c, .. }
            | AnalyticPotential::ConjugatePair { c, .. }
            | AnalyticPotential::RationalProduct { c, .. }
            | AnalyticPotential::GaussianMonomial { c, .. } => c,
            AnalyticPotential::ExpSine { .. } => 2.0,
        }
    }

    /// Same family with the strength parameter replaced.
    pub fn with_strength(&self, c_new: f64) -> Result<Self> {
        let mut p = self.clone();
        match &mut p {
            AnalyticPotential::InversePower { c, .. }
            | AnalyticPotential::InversePowerN { c, .. }
            | AnalyticPotential::ConjugatePair { c, .. }
            | AnalyticPotential::RationalProduct { c, .. }
            | AnalyticPotential::GaussianMonomial { c, .. } => *c = c_new,
            AnalyticPotential::ExpSine { .. } => {
                return Err(Error::InvalidParameter("exp_sine has a fixed amplitude".into()))
            }
        }
        Ok(p)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.strength() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        let finite = |x: f64| x.is_finite();
        match self {
            AnalyticPotential::InversePower { c, a, gamma } => {
                if !(finite(*c) && *a > 0.0 && finite(*a) && *gamma > 1.0 && finite(*gamma)) {
                    return bad("inverse_power needs a > 0 and gamma > 1");
                }
            }
            AnalyticPotential::InversePowerN { c, a, n, gamma } => {
                if !(finite(*c) && *a > 0.0 && finite(*a) && *n >= 2 && finite(*gamma) && *n as f64 * gamma > 1.0) {
                    return bad("inverse_power_n needs a > 0, n >= 2 and n*gamma > 1");
                }
            }
            AnalyticPotential::ConjugatePair { c, w, gamma } => {
                let arg = w.arg();
                if !(finite(*c) && w.norm() > 0.0 && arg > 0.0 && arg < PI && 2.0 * gamma > 1.0 && finite(*gamma)) {
                    return bad("conjugate_pair needs 0 < arg w < pi and 2 gamma > 1");
                }
            }
            AnalyticPotential::RationalProduct { c, numerator, denominator } => {
                if !finite(*c) || denominator.is_empty() {
                    return bad("rational_product needs a finite c and a non-empty denominator");
                }
                for d in denominator {
                    let ok = match *d {
                        DenominatorFactor::Linear { a, power } => a > 0.0 && power >= 1,
                        DenominatorFactor::Binomial { n, a, power } => a > 0.0 && n >= 1 && power >= 1,
                    };
                    if !ok {
                        return bad("denominator factors need a > 0 and positive powers");
                    }
                }
                if numerator.iter().any(|f| !f.root.is_finite()) {
                    return bad("numerator roots must be finite");
                }
                if self.decay_exponent() <= 1.0 {
                    return bad("rational_product must decay faster than 1/x");
                }
            }
            AnalyticPotential::ExpSine { a } => {
                if !(*a > 0.0 && finite(*a)) {
                    return bad("exp_sine needs a > 0");
                }
            }
            AnalyticPotential::GaussianMonomial { c, n, scale, .. } => {
                if !(finite(*c) && *n >= 1 && *scale > 0.0 && finite(*scale)) {
                    return bad("gaussian_monomial needs n >= 1 and scale > 0");
                }
            }
        }
        Ok(())
    }

    /// Sector half-angle `theta0`.
    pub fn sector(&self) -> f64 {
        match self {
            AnalyticPotential::InversePower { .. } => PI,
            AnalyticPotential::InversePowerN { n, .. } => PI / *n as f64,
            AnalyticPotential::ConjugatePair { w, .. } => w.arg(),
            AnalyticPotential::RationalProduct { denominator, .. } => {
                denominator.iter().map(|d| d.sector()).fold(PI, f64::min)
            }
            AnalyticPotential::ExpSine { a } => a.atan(),
            AnalyticPotential::GaussianMonomial { n, .. } => PI / (2 * n) as f64,
        }
    }

    /// Whether `theta0` is only a supremum (rays must stay a margin inside).
    pub fn sector_is_open(&self) -> bool {
        matches!(self, AnalyticPotential::ExpSine { .. } | AnalyticPotential::GaussianMonomial { .. })
    }

    /// Largest usable ray angle (exclusive) given the margin for open sectors.
    pub fn max_ray_angle(&self, margin: f64) -> f64 {
        if self.sector_is_open() {
            self.sector() - margin
        } else {
            self.sector()
        }
    }

    fn is_exponential(&self) -> bool {
        matches!(self, AnalyticPotential::ExpSine { .. } | AnalyticPotential::GaussianMonomial { .. })
    }

    /// Effective power-decay exponent of `|q(xi)|`.
    pub fn decay_exponent(&self) -> f64 {
        match self {
            AnalyticPotential::InversePower { gamma, .. } => *gamma,
            AnalyticPotential::InversePowerN { n, gamma, .. } => *n as f64 * gamma,
            AnalyticPotential::ConjugatePair { gamma, .. } => 2.0 * gamma,
            AnalyticPotential::RationalProduct { numerator, denominator, .. } => {
                let den: u32 = denominator.iter().map(|d| d.degree()).sum();
                let num: u32 = numerator.iter().map(|f| f.power).sum();
                den as f64 - num as f64
            }
            // any exponent works for exponential decay
            AnalyticPotential::ExpSine { .. } | AnalyticPotential::GaussianMonomial { .. } => 3.0,
        }
    }

    /// Singular points of the analytic extension.
    pub fn singularities(&self) -> Vec<Complex64> {
        match self {
            AnalyticPotential::InversePower { a, .. } => vec![Complex64::new(-a, 0.0)],
            AnalyticPotential::InversePowerN { a, n, .. } => binomial_roots(*n, *a),
            AnalyticPotential::ConjugatePair { w, .. } => vec![*w, w.conj()],
            AnalyticPotential::RationalProduct { denominator, .. } => {
                denominator.iter().flat_map(|d| d.roots()).collect()
            }
            AnalyticPotential::ExpSine { .. } | AnalyticPotential::GaussianMonomial { .. } => Vec::new(),
        }
    }

    /// Radii at which `|q|` along a ray may have kinks or sharp features.
    pub fn feature_radii(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.singularities().iter().map(|s| s.norm()).collect();
        if let AnalyticPotential::RationalProduct { numerator, .. } = self {
            r.extend(numerator.iter().map(|f| f.root.abs()).filter(|x| *x > 0.0));
        }
        if let AnalyticPotential::GaussianMonomial { scale, .. } = self {
            r.push(*scale);
        }
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }

    /// Local length scale on which `q` varies near `xi`.
    pub fn length_scale(&self, xi: Complex64) -> f64 {
        let mut l = self
            .singularities()
            .iter()
            .map(|s| (xi - s).norm())
            .fold(f64::INFINITY, f64::min);
        match *self {
            AnalyticPotential::ExpSine { a } => l = l.min(1.0 / (a * a + 1.0).sqrt()),
            AnalyticPotential::GaussianMonomial { n, scale, m, .. } => {
                let r = xi.norm() / scale;
                let growth = n as f64 * r.powi(n as i32 - 1) / scale;
                l = l.min(1.0 / growth.max(1e-300));
                if m > 0 {
                    l = l.min(scale.max(xi.norm()));
                }
            }
            _ => {}
        }
        l
    }

    /// Evaluates the analytic extension without any sector check.
    pub fn value(&self, xi: Complex64) -> Complex64 {
        match self {
            AnalyticPotential::InversePower { c, a, gamma } => *c * inv_pow(xi + a, *gamma),
            AnalyticPotential::InversePowerN { c, a, n, gamma } => {
                *c * inv_pow(xi.powu(*n) + a.powi(*n as i32), *gamma)
            }
            AnalyticPotential::ConjugatePair { c, w, gamma } => {
                let d = *w / w.norm();
                *c * inv_pow_cut(xi - w, *gamma, d) * inv_pow_cut(xi - w.conj(), *gamma, d.conj())
            }
            AnalyticPotential::RationalProduct { c, numerator, denominator } => {
                let num = numerator
                    .iter()
                    .fold(Complex64::new(*c, 0.0), |acc, f| acc * (xi - f.root).powu(f.power));
                let den = denominator
                    .iter()
                    .fold(Complex64::new(1.0, 0.0), |acc, d| acc * d.value(xi));
                num / den
            }
            AnalyticPotential::ExpSine { a } => {
                let i = Complex64::i();
                i * ((-(a + i) * xi).exp() - (-(a - i) * xi).exp())
            }
            AnalyticPotential::GaussianMonomial { c, m, n, scale } => {
                *c * xi.powu(*m) * (-(xi / scale).powu(*n)).exp()
            }
        }
    }

    /// Checked evaluation: `xi` must lie in the open sector or on `[0, inf)`.
    pub fn eval(&self, xi: Complex64) -> Result<Complex64> {
        if !(xi.re.is_finite() && xi.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite argument {xi}")));
        }
        let on_axis = xi.im == 0.0 && xi.re >= 0.0;
        let theta0 = self.sector();
        if !on_axis && xi.arg().abs() >= theta0 {
            return Err(Error::OutOfSector { xi, theta0 });
        }
        if let AnalyticPotential::InversePower { a, gamma, .. } = *self {
            let u = xi + a;
            if !is_integer(gamma) && u.im == 0.0 && u.re <= 0.0 {
                return Err(Error::BranchViolation { xi });
            }
        }
        let v = self.value(xi);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::BranchViolation { xi });
        }
        Ok(if on_axis { Complex64::new(v.re, 0.0) } else { v })
    }

    /// Radius beyond which the sampled decay constant applies.
    pub fn decay_check_radius(&self) -> f64 {
        let feature = self.feature_radii().into_iter().fold(0.0, f64::max);
        (4.0 * feature).max(10.0)
    }

    /// Decay constants: `k` is the supremum of `|q(xi)| |xi|^gamma` over a
    /// sample grid of the sector with `|xi| >= xi_check`, times a safety factor.
    pub fn decay_bound(&self) -> DecayBound {
        let gamma = self.decay_exponent();
        let xi_check = self.decay_check_radius();
        let theta_max = self.sector() - DEFAULT_SECTOR_MARGIN;
        let mut sup: f64 = 0.0;
        let n_ang = 41;
        let n_rad = 600;
        for i in 0..n_ang {
            let th = -theta_max + 2.0 * theta_max * i as f64 / (n_ang - 1) as f64;
            let dir = Complex64::from_polar(1.0, th);
            for j in 0..=n_rad {
                let r = xi_check * 10f64.powf(6.0 * j as f64 / n_rad as f64);
                let v = self.value(dir * r).norm() * r.powf(gamma);
                if v.is_finite() {
                    sup = sup.max(v);
                }
            }
        }
        DecayBound { gamma, k: K_SAFETY * sup, xi_check }
    }

    /// Distance from the ray `{t e^{-i theta}}` to the nearest singularity.
    pub fn ray_singular_distance(&self, theta: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, theta);
        self.singularities()
            .iter()
            .map(|s| {
                let u = s * rot;
                if u.re <= 0.0 {
                    u.norm()
                } else {
                    u.im.abs()
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound on `int_T^inf t^w |q(t e^{-i theta})| dt`.
    fn ray_tail(&self, theta: f64, cutoff: f64, weight: u32, decay: &DecayBound) -> f64 {
        let w = weight as f64;
        match *self {
            AnalyticPotential::ExpSine { a } => {
                let r = a * theta.cos() - theta.sin().abs();
                if r <= 0.0 {
                    return f64::INFINITY;
                }
                2.0 * (-r * cutoff).exp() * (cutoff.powf(w) / r + w / (r * r))
            }
            AnalyticPotential::GaussianMonomial { c, m, n, scale } => {
                let beta = (n as f64 * theta).cos() / (scale.powi(n as i32));
                if beta <= 0.0 {
                    return f64::INFINITY;
                }
                let s = (m as f64 + w + 1.0) / n as f64;
                let x = beta * cutoff.powi(n as i32);
                c.abs() / n as f64 * beta.powf(-s) * gamma(s) * gamma_ur(s, x)
            }
            _ => {
                if cutoff < decay.xi_check {
                    return f64::INFINITY;
                }
                decay.k * cutoff.powf(w + 1.0 - decay.gamma) / (decay.gamma - 1.0 - w)
            }
        }
    }

    /// Weighted ray integral `int_0^inf t^weight |q(t e^{-i theta})| dt`
    /// for `0 <= theta < theta0`, to absolute accuracy `tol`.
    pub fn ray_integral(&self, theta: f64, weight: u32, tol: f64) -> Result<RayIntegral> {
        self.validate()?;
        if weight > 1 {
            return Err(Error::InvalidParameter(format!("weight must be 0 or 1, got {weight}")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        let theta_max = self.max_ray_angle(DEFAULT_SECTOR_MARGIN);
        if !(theta >= 0.0 && theta < theta_max) {
            return Err(Error::OutOfSector { xi: Complex64::from_polar(1.0, -theta), theta0: self.sector() });
        }
        let gamma = self.decay_exponent();
        if !self.is_exponential() && gamma <= 1.0 + weight as f64 {
            return Err(Error::SlowDecay { gamma, weight });
        }
        let singular_distance = self.ray_singular_distance(theta);
        if self.is_identically_zero() {
            return Ok(RayIntegral {
                theta,
                weight,
                value: 0.0,
                abs_err: 0.0,
                cutoff: 0.0,
                singular_distance,
                near_singular: singular_distance < NEAR_SINGULAR_FLOOR,
            });
        }
        let decay = if self.is_exponential() {
            DecayBound { gamma, k: f64::NAN, xi_check: 0.0 }
        } else {
            self.decay_bound()
        };
        let mut cutoff = decay.xi_check.max(1.0);
        let mut tail = self.ray_tail(theta, cutoff, weight, &decay);
        while !(tail < 0.5 * tol) {
            cutoff *= 2.0;
            if cutoff > 1e300 {
                return Err(Error::QuadratureFailure("tail bound never fell below tolerance".into()));
            }
            tail = self.ray_tail(theta, cutoff, weight, &decay);
        }
        let breaks = ray_breakpoints(&self.feature_radii(), cutoff);
        let dir = Complex64::from_polar(1.0, -theta);
        let integrand = |t: f64| {
            let v = self.value(dir * t).norm();
            if weight == 1 {
                t * v
            } else {
                v
            }
        };
        let q = quadrature::integrate(integrand, &breaks, 0.5 * tol, 200_000)?;
        Ok(RayIntegral {
            theta,
            weight,
            value: q.value.max(0.0),
            abs_err: q.abs_err + tail,
            cutoff,
            singular_distance,
            near_singular: singular_distance < NEAR_SINGULAR_FLOOR,
        })
    }

    /// Closed-form `I(theta)` where one is known.
    pub fn closed_form_ray_integral(&self, theta: f64) -> Option<ClosedForm> {
        if self.is_identically_zero() {
            return Some(ClosedForm::Exact(0.0));
        }
        match *self {
            AnalyticPotential::InversePower { c, a, gamma } if gamma == 2.0 => {
                let ratio = if theta == 0.0 { 1.0 } else { theta / theta.sin() };
                Some(ClosedForm::Exact(c.abs() * ratio / a))
            }
            AnalyticPotential::InversePowerN { c, a, n: 2, gamma } if gamma == 2.0 => {
                Some(ClosedForm::Exact(PI * c.abs() / (4.0 * a.powi(3)) / theta.cos()))
            }
            AnalyticPotential::ExpSine { a } => {
                let r = a * theta.cos() - theta.sin();
                (r > 0.0).then(|| ClosedForm::UpperBound(2.0 / r))
            }
            AnalyticPotential::GaussianMonomial { c, m, n, scale } => {
                let s = (m as f64 + 1.0) / n as f64;
                let moment = gamma(s) / n as f64;
                let cn = (n as f64 * theta).cos();
                (cn > 0.0).then(|| ClosedForm::Exact(c.abs() * scale.powf(m as f64 + 1.0) * cn.powf(-s) * moment))
            }
            _ => None,
        }
    }
}

/// Initial panel boundaries on [0, cutoff]: graded toward 0 and toward every
/// feature radius, then doubling out to the cutoff.
fn ray_breakpoints(features: &[f64], cutoff: f64) -> Vec<f64> {
    let mut pts = vec![0.0, cutoff];
    let base = features.iter().copied().filter(|r| *r > 0.0).fold(1.0, f64::min);
    for k in 1..=10 {
        pts.push(base * 0.5f64.powi(k));
    }
    for &r in features {
        for k in 1..=20 {
            let d = r * 0.5f64.powi(k);
            pts.push(r - d);
            pts.push(r + d);
        }
        pts.push(r);
    }
    let mut x = base;
    while x < cutoff {
        pts.push(x);
        x *= 2.0;
    }
    pts.retain(|p| *p >= 0.0 && *p <= cutoff);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
    pts
}
