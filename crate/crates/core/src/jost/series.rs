//! Iterated series `W = sum_n W_n` on a shared Chebyshev-Lobatto grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potentials::AnalyticPotential;
use crate::quadrature::{LobattoPanel, PANEL_DEGREE};

use super::ray::{self, factorial, Ray};
use super::{assemble, JostOptions, JostResult, Method};

const NODES: usize = PANEL_DEGREE + 1;
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Majorant rate `r` with `|u_n(0)| + |v_n(0)| <= r^n / n!`.
pub fn majorant_rate(pot: &AnalyticPotential, ray: &Ray, tol: f64) -> Result<f64> {
    let ri = pot.ray_integral(ray.eta.abs(), 0, tol)?;
    Ok((ri.value + ri.abs_err) / ray.z.norm())
}

/// `sum_{n > N} r^n / n!`.
pub fn remainder(rate: f64, n: usize) -> f64 {
    let mut term = rate.powi(n as i32 + 1) / factorial(n + 1);
    let mut sum = 0.0;
    let mut k = n + 1;
    while term > 1e-300 && (term > 1e-18 * sum || k < n + 3) {
        sum += term;
        k += 1;
        term *= rate / k as f64;
        if k > n + 10_000 {
            break;
        }
    }
    sum
}

/// Per-order values `u_n(0)`, `v_n(0)` together with the assembled result.
pub struct SeriesTerms {
    pub result: JostResult,
    pub terms: Vec<(Complex64, Complex64)>,
    pub rate: f64,
}

pub fn iterate_series_terms(
    pot: &AnalyticPotential,
    z: Complex64,
    alpha: f64,
    opts: &JostOptions,
) -> Result<SeriesTerms> {
    pot.validate()?;
    let ray = Ray::for_point(pot, z, opts)?;
    let tol = opts.tol;
    if pot.is_identically_zero() {
        let result = assemble(z, alpha, Complex64::new(1.0, 0.0), I * z, 0, 0.0, Method::Series);
        return Ok(SeriesTerms { result, terms: vec![(Complex64::new(1.0, 0.0), ZERO)], rate: 0.0 });
    }
    let rate = majorant_rate(pot, &ray, 1e-3 * tol)?;
    let tail = ray::tail_data(pot, &ray, tol)?;
    let panels = ray::panels(pot, &ray, tail.s, opts.max_panel_width);
    let lob = LobattoPanel::standard();
    let w = ray.omega;

    let mut p_vals: Vec<[Complex64; NODES]> = Vec::with_capacity(panels.len());
    for &(a, b) in &panels {
        let hh = 0.5 * (b - a);
        let mut row = [ZERO; NODES];
        for (j, x) in lob.nodes.iter().enumerate() {
            row[j] = ray.p(pot, a + hh * (1.0 + x));
        }
        p_vals.push(row);
    }

    // order 0: u = 1, v = 0 everywhere
    let mut u_prev: Vec<[Complex64; NODES]> = vec![[Complex64::new(1.0, 0.0); NODES]; panels.len()];
    let mut v_prev: Vec<[Complex64; NODES]> = vec![[ZERO; NODES]; panels.len()];
    let mut terms = vec![(Complex64::new(1.0, 0.0), ZERO)];
    let mut psi0 = Complex64::new(1.0, 0.0);
    let mut dsum = Complex64::new(1.0, 0.0);

    let mut n = 0;
    let mut bound = remainder(rate, 0);
    while bound >= tol {
        n += 1;
        if n > opts.n_max {
            return Err(Error::SlowConvergence { max_terms: opts.n_max, rate });
        }
        let (mut ub, mut vb) = tail.order(n);
        let mut u_next = vec![[ZERO; NODES]; panels.len()];
        let mut v_next = vec![[ZERO; NODES]; panels.len()];
        for (k, &(a, b)) in panels.iter().enumerate().rev() {
            let hh = 0.5 * (b - a);
            let taus: Vec<f64> = lob.nodes.iter().map(|x| a + hh * (1.0 + x)).collect();
            let f: Vec<Complex64> = (0..NODES).map(|j| p_vals[k][j] * (u_prev[k][j] + v_prev[k][j])).collect();
            let g: Vec<Complex64> = (0..NODES).map(|j| f[j] * (2.0 * I * w * (taus[j] - a)).exp()).collect();
            for j in 0..NODES {
                let row = &lob.cumulative[j];
                let mut su = ZERO;
                let mut sv = ZERO;
                for m in 0..NODES {
                    su += f[m] * row[m];
                    sv += g[m] * row[m];
                }
                u_next[k][j] = ub + su * hh;
                v_next[k][j] = (2.0 * I * w * (b - taus[j])).exp() * vb
                    - (-2.0 * I * w * (taus[j] - a)).exp() * sv * hh;
            }
            ub = u_next[k][NODES - 1];
            vb = v_next[k][NODES - 1];
        }
        terms.push((ub, vb));
        psi0 += ub + vb;
        dsum += ub - vb;
        u_prev = u_next;
        v_prev = v_next;
        bound = remainder(rate, n);
    }
    let tail_bound = bound + tail.error;
    let result = assemble(z, alpha, psi0, I * z * dsum, n, tail_bound, Method::Series);
    Ok(SeriesTerms { result, terms, rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remainder_of_exponential_series() {
        let r: f64 = 1.7;
        let partial: f64 = (0..=5).map(|k| r.powi(k) / factorial(k as usize)).sum();
        assert!((remainder(r, 5) - (r.exp() - partial)).abs() < 1e-14);
    }
}
