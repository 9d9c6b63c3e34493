//! Run configuration documents.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sturm_resonance::jost::Method;
use sturm_resonance::regions::Criterion;
use sturm_resonance::resonances::{ScalingConfig, SearchOptions, SearchRegion, TrackOptions};
use sturm_resonance::AnalyticPotential;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.re, p.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: AnalyticPotential,
    #[serde(default)]
    pub alpha: f64,
    /// Accuracy target for Jost evaluations and ray integrals.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Also write outputs with `z` divided by `|c|`.
    #[serde(default)]
    pub normalize_c: bool,
    #[serde(default)]
    pub scaling: ScalingConfig,
    pub jost: Option<JostParams>,
    pub region: Option<RegionParams>,
    pub resonance: Option<ResonanceParams>,
    pub track: Option<TrackParams>,
    pub spectral: Option<SpectralParams>,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// Rectangular grid `re x im`, `n_re x n_im` points including the end points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JostParams {
    #[serde(default = "default_method")]
    pub method: Method,
    pub grid: Option<Grid>,
    #[serde(default)]
    pub points: Vec<Point>,
}

fn default_method() -> Method {
    Method::Volterra
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionParams {
    #[serde(default = "default_criterion")]
    pub criterion: Criterion,
    /// Number of angles when `thetas` is absent.
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    pub thetas: Option<Vec<f64>>,
}

impl Default for RegionParams {
    fn default() -> Self {
        RegionParams { criterion: default_criterion(), n_theta: default_n_theta(), thetas: None }
    }
}

fn default_criterion() -> Criterion {
    Criterion::General
}

fn default_n_theta() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceParams {
    #[serde(default)]
    pub regions: Vec<SearchRegion>,
    #[serde(default)]
    pub seeds: Vec<Point>,
    #[serde(default)]
    pub search: SearchOptions,
    /// Angles of the boundary curve written with `normalize_c`.
    #[serde(default = "default_n_theta")]
    pub overlay_n_theta: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackParams {
    /// Values of the strength `c`, starting at the seed.
    pub params: Vec<f64>,
    pub seed: Point,
    #[serde(default)]
    pub options: TrackOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralParams {
    pub mu_range: (f64, f64),
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
}

fn default_grid_n() -> usize {
    200
}

/// Evenly spaced values from `a` to `b`; a single value is `a`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

impl Grid {
    pub fn points(&self) -> Vec<Complex64> {
        let res = linspace(self.re.0, self.re.1, self.n_re);
        let ims = linspace(self.im.0, self.im.1, self.n_im);
        ims.iter().flat_map(|&y| res.iter().map(move |&x| Complex64::new(x, y))).collect()
    }
}
