//! Adaptive Gauss-Kronrod quadrature and spectral panel integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel. Returns (Kronrod value, |Kronrod - Gauss|).
pub fn gk15<T: Scalar, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).magnitude())
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    pub abs_err: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss-Kronrod integration over the consecutive intervals
/// defined by `breakpoints` (strictly increasing, at least two entries).
pub fn integrate<T: Scalar, F: FnMut(f64) -> T>(
    mut f: F,
    breakpoints: &[f64],
    tol: f64,
    max_segments: usize,
) -> Result<Quadrature<T>> {
    if breakpoints.len() < 2 {
        return Err(Error::QuadratureFailure("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    let mut evals = 0;
    for w in breakpoints.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::QuadratureFailure(format!("breakpoints not increasing: {} {}", w[0], w[1])));
        }
        let (value, err) = gk15(&mut f, w[0], w[1]);
        evals += 15;
        total = total + value;
        total_err += err;
        heap.push(Segment { a: w[0], b: w[1], value, err });
    }
    while total_err > tol {
        if heap.len() >= max_segments {
            return Err(Error::QuadratureFailure(format!(
                "segment limit {max_segments} reached with error {total_err:e} > {tol:e}"
            )));
        }
        let seg = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // interval cannot be split further in floating point
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid);
        let (v2, e2) = gk15(&mut f, mid, seg.b);
        evals += 30;
        total = total - seg.value + v1 + v2;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let mut value = T::zero();
    let mut abs_err = 0.0;
    for s in heap.iter() {
        value = value + s.value;
        abs_err += s.err;
    }
    if !value.magnitude().is_finite() {
        return Err(Error::QuadratureFailure("non-finite integrand".into()));
    }
    Ok(Quadrature { value, abs_err, evaluations: evals })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = t;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Polynomial degree of the Chebyshev-Lobatto panels.
pub const PANEL_DEGREE: usize = 16;

/// Chebyshev-Lobatto nodes `x_j = cos(j pi / p)` on [-1, 1] together with the
/// backward cumulative integration matrix `C[j][k]` such that
/// `int_{x_j}^{1} f(x) dx = sum_k C[j][k] f(x_k)` for polynomials of degree <= p.
pub struct LobattoPanel {
    pub nodes: Vec<f64>,
    pub cumulative: Vec<Vec<f64>>,
}

impl LobattoPanel {
    fn build(p: usize) -> Self {
        let nodes: Vec<f64> = (0..=p).map(|j| (std::f64::consts::PI * j as f64 / p as f64).cos()).collect();
        let bary: Vec<f64> = (0..=p)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == p {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let lagrange = |k: usize, x: f64| -> f64 {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..=p {
                let d = x - nodes[j];
                if d == 0.0 {
                    return if j == k { 1.0 } else { 0.0 };
                }
                let t = bary[j] / d;
                den += t;
                if j == k {
                    num = t;
                }
            }
            num / den
        };
        let (gx, gw) = gauss_legendre(p + 2);
        let mut cumulative = vec![vec![0.0; p + 1]; p + 1];
        for (j, row) in cumulative.iter_mut().enumerate() {
            let lo = nodes[j];
            let half = 0.5 * (1.0 - lo);
            if half == 0.0 {
                continue;
            }
            let mid = 0.5 * (1.0 + lo);
            for (k, entry) in row.iter_mut().enumerate() {
                *entry = gx
                    .iter()
                    .zip(&gw)
                    .map(|(&x, &w)| w * lagrange(k, mid + half * x))
                    .sum::<f64>()
                    * half;
            }
        }
        LobattoPanel { nodes, cumulative }
    }

    /// Shared panel of degree [`PANEL_DEGREE`].
    pub fn standard() -> &'static LobattoPanel {
        static PANEL: OnceLock<LobattoPanel> = OnceLock::new();
        PANEL.get_or_init(|| LobattoPanel::build(PANEL_DEGREE))
    }
}
