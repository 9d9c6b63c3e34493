//! Adaptive Dormand-Prince 5(4) integrator for complex first-order systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State<const N: usize> = [Complex64; N];

/// Step-size control for [`Dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Largest permitted |step|.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-10, atol: 1e-12, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Statistics of one integration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
    ///
    /// `after_step` runs after every accepted step and may rescale the state
    /// in place (used for log-rescaling of growing solutions).
    pub fn solve<const N: usize, F, G>(
        &self,
        mut f: F,
        t0: f64,
        y0: State<N>,
        t1: f64,
        mut after_step: G,
    ) -> Result<(State<N>, Stats)>
    where
        F: FnMut(f64, &State<N>) -> State<N>,
        G: FnMut(f64, &mut State<N>),
    {
        let mut stats = Stats::default();
        let span = t1 - t0;
        if span == 0.0 {
            return Ok((y0, stats));
        }
        let dir = span.signum();
        let mut t = t0;
        let mut y = y0;
        let mut h = (span.abs() / 64.0).min(self.h_max).max(1e-12 * span.abs());
        let mut k = [[Complex64::new(0.0, 0.0); N]; 7];
        k[0] = f(t, &y);
        let zero = Complex64::new(0.0, 0.0);
        while (t1 - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::StepperFailure(format!("step budget {} exhausted at t = {t}", self.max_steps)));
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;
            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    let mut acc = zero;
                    for j in 0..s {
                        if A[s][j] != 0.0 {
                            acc += k[j][i] * A[s][j];
                        }
                    }
                    *yi += acc * hs;
                }
                k[s] = f(t + C[s] * hs, &ys);
            }
            // 5th-order solution is the stage-7 argument (FSAL)
            let mut y_new = y;
            for (i, yi) in y_new.iter_mut().enumerate() {
                let mut acc = zero;
                for j in 0..6 {
                    acc += k[j][i] * A[6][j];
                }
                *yi += acc * hs;
            }
            let mut err = 0.0f64;
            for i in 0..N {
                let mut e = zero;
                for j in 0..7 {
                    e += k[j][i] * E[j];
                }
                let scale = self.atol + self.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max((e * hs).norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::StepperFailure(format!("non-finite state near t = {t}")));
            }
            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { t1 } else { t + hs };
                y = y_new;
                after_step(t, &mut y);
                k[0] = if y == y_new { k[6] } else { f(t, &y) };
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h * fac).min(self.h_max);
            } else {
                stats.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::StepperFailure(format!("step size underflow at t = {t}")));
                }
            }
        }
        Ok((y, stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_backward() {
        // y'' = -y, from t = 10 back to 0 with y = cos t
        let solver = Dopri5 { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let y0 = [Complex64::new(10f64.cos(), 0.0), Complex64::new(-(10f64.sin()), 0.0)];
        let (y, _) = solver.solve(|_, y| [y[1], -y[0]], 10.0, y0, 0.0, |_, _| {}).unwrap();
        assert!((y[0] - 1.0).norm() < 1e-9);
        assert!(y[1].norm() < 1e-9);
    }

    #[test]
    fn complex_exponential() {
        let lam = Complex64::new(-0.3, 2.0);
        let solver = Dopri5::default();
        let (y, _) = solver.solve(|_, y| [lam * y[0]], 0.0, [Complex64::new(1.0, 0.0)], 5.0, |_, _| {}).unwrap();
        assert!((y[0] - (lam * 5.0).exp()).norm() < 1e-8);
    }

    #[test]
    fn rescaling_hook_is_applied() {
        let solver = Dopri5::default();
        let mut log_scale = 0.0;
        let (y, _) = solver
            .solve(
                |_, y| [y[0] * 3.0],
                0.0,
                [Complex64::new(1.0, 0.0)],
                100.0,
                |_, y| {
                    let n = y[0].norm();
                    log_scale += n.ln();
                    y[0] /= n;
                },
            )
            .unwrap();
        assert!((y[0].norm() - 1.0).abs() < 1e-12);
        assert!((log_scale - 300.0).abs() < 1e-6);
    }
}
