//! The Jost solution at `x = 0` and the boundary function
//! `Psi(z) = psi(0, z) cos(alpha) + psi'(0, z) sin(alpha)`, on the physical
//! sheet and continued into the lower half-plane sector `0 < -arg z < theta0`.

mod oracle;
pub mod ray;
mod series;
mod volterra;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::potentials::AnalyticPotential;

pub use oracle::{default_oracle_x, oracle_backward_integration};
pub use ray::{Ray, TailData};
pub use series::{iterate_series_terms, majorant_rate, SeriesTerms};
pub use volterra::volterra_solve;

/// Below this modulus the factor `cos(alpha) + i z sin(alpha)` is treated as zero.
pub const NORMALIZATION_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Volterra,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JostOptions {
    /// Absolute accuracy target.
    pub tol: f64,
    /// Smallest admissible `|z|`.
    pub z_min: f64,
    /// Largest number of series terms.
    pub n_max: usize,
    /// Margin kept from the edge of open sectors.
    pub sector_margin: f64,
    /// Largest panel width in the scaled ray variable.
    pub max_panel_width: f64,
    /// If set, the marching step is capped at `S / mesh_points`.
    pub mesh_points: Option<usize>,
}

impl Default for JostOptions {
    fn default() -> Self {
        JostOptions {
            tol: 1e-10,
            z_min: 1e-3,
            n_max: 40,
            sector_margin: crate::potentials::DEFAULT_SECTOR_MARGIN,
            max_panel_width: 1.0,
            mesh_points: None,
        }
    }
}

impl JostOptions {
    pub fn with_tol(tol: f64) -> Self {
        JostOptions { tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostResult {
    pub z: Complex64,
    pub alpha: f64,
    /// `psi(0, z)`
    pub psi0: Complex64,
    /// `psi'(0, z)`
    pub dpsi0: Complex64,
    /// `Psi(z)`
    pub big_psi: Complex64,
    /// `Psi(z) / (cos(alpha) + i z sin(alpha))` when that factor is not tiny.
    pub normalized_psi: Option<Complex64>,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub method: Method,
}

/// `cos(alpha) + i z sin(alpha)`, the value of `Psi` for `q = 0`.
pub fn free_boundary_factor(z: Complex64, alpha: f64) -> Complex64 {
    alpha.cos() + Complex64::i() * z * alpha.sin()
}

pub(crate) fn assemble(
    z: Complex64,
    alpha: f64,
    psi0: Complex64,
    dpsi0: Complex64,
    terms_used: usize,
    tail_bound: f64,
    method: Method,
) -> JostResult {
    let big_psi = psi0 * alpha.cos() + dpsi0 * alpha.sin();
    let f = free_boundary_factor(z, alpha);
    JostResult {
        z,
        alpha,
        psi0,
        dpsi0,
        big_psi,
        normalized_psi: (f.norm() > NORMALIZATION_FLOOR).then(|| big_psi / f),
        terms_used,
        tail_bound,
        method,
    }
}

/// Sums the iterated series.
pub fn iterate_series(pot: &AnalyticPotential, z: Complex64, alpha: f64, opts: &JostOptions) -> Result<JostResult> {
    Ok(iterate_series_terms(pot, z, alpha, opts)?.result)
}

/// Majorant `r^n / n!` for the order-`n` term at `x = 0`.
pub fn term_bound(pot: &AnalyticPotential, z: Complex64, n: usize, opts: &JostOptions) -> Result<f64> {
    let ray = Ray::for_point(pot, z, opts)?;
    let r = if pot.is_identically_zero() { 0.0 } else { majorant_rate(pot, &ray, 1e-3 * opts.tol)? };
    Ok(r.powi(n as i32) / ray::factorial(n))
}

/// Evaluates with the chosen method.
pub fn evaluate(pot: &AnalyticPotential, z: Complex64, alpha: f64, method: Method, opts: &JostOptions) -> Result<JostResult> {
    match method {
        Method::Series => iterate_series(pot, z, alpha, opts),
        Method::Volterra => volterra_solve(pot, z, alpha, opts),
    }
}
