// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) stepping for complex linear systems.
//!
//! The integrator keeps every accepted step as a checkpoint. Values between
//! checkpoints come from a single fresh step of the same scheme started at
//! the preceding checkpoint, so an evaluation at `t` is a smooth function of
//! `t` inside each checkpoint interval.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12 }
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
// 5th-order weights equal the last row of A; E = b5 − b4.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

const MAX_STEPS: usize = 2_000_000;

/// Right-hand side `dy/dt = f(t, y)` written into `out`.
pub trait System {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[C64], out: &mut [C64]);
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub t: f64,
    pub y: Vec<C64>,
}

/// All accepted steps of an integration from `t = 0` to `t_end`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub checkpoints: Vec<Checkpoint>,
    pub t_end: f64,
}

struct Stepper {
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
}

impl Stepper {
    fn new(dim: usize) -> Self {
        Self { k: vec![vec![C64::new(0.0, 0.0); dim]; 7], tmp: vec![C64::new(0.0, 0.0); dim] }
    }

    /// One Dormand–Prince step; writes the 5th-order result into `y_new` and
    /// returns the error norm scaled by the tolerances.
    fn step<S: System>(&mut self, sys: &S, t: f64, y: &[C64], h: f64, tol: Tolerances, y_new: &mut [C64]) -> f64 {
        let dim = y.len();
        sys.rhs(t, y, &mut self.k[0]);
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for j in 0..s {
                    if A[s][j] != 0.0 {
                        acc += self.k[j][i] * (h * A[s][j]);
                    }
                }
                self.tmp[i] = acc;
            }
            sys.rhs(t + C[s] * h, &self.tmp, &mut self.k[s]);
            if s == 6 {
                y_new.copy_from_slice(&self.tmp);
            }
        }
        let mut err = 0.0;
        for i in 0..dim {
            let mut e = C64::new(0.0, 0.0);
            for s in 0..7 {
                if E[s] != 0.0 {
                    e += self.k[s][i] * (h * E[s]);
                }
            }
            let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        (err / dim.max(1) as f64).sqrt()
    }
}

/// Adaptively integrates `sys` from `(0, y0)` to `t_end`.
pub fn integrate<S: System>(sys: &S, y0: Vec<C64>, t_end: f64, tol: Tolerances) -> Result<Solution> {
    let dim = sys.dim();
    assert_eq!(y0.len(), dim, "initial state has wrong dimension");
    let mut stepper = Stepper::new(dim);
    let mut t = 0.0;
    let mut y = y0;
    let mut y_new = vec![C64::new(0.0, 0.0); dim];
    let mut checkpoints = vec![Checkpoint { t, y: y.clone() }];

    let mut h = initial_step(sys, &y, t_end, tol);
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::ToleranceFailure { t, step: h });
        }
        let last = t + h >= t_end;
        let h_try = if last { t_end - t } else { h };
        let err = stepper.step(sys, t, &y, h_try, tol, &mut y_new);
        if !err.is_finite() {
            return Err(Error::ToleranceFailure { t, step: h_try });
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + h_try };
            std::mem::swap(&mut y, &mut y_new);
            checkpoints.push(Checkpoint { t, y: y.clone() });
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = h_try * fac;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::ToleranceFailure { t, step: h });
        }
    }
    Ok(Solution { checkpoints, t_end })
}

fn initial_step<S: System>(sys: &S, y: &[C64], t_end: f64, tol: Tolerances) -> f64 {
    let mut f0 = vec![C64::new(0.0, 0.0); y.len()];
    sys.rhs(0.0, y, &mut f0);
    let scale = |i: usize| tol.atol + tol.rtol * y[i].norm();
    let d0 = (0..y.len()).map(|i| (y[i].norm() / scale(i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..y.len()).map(|i| (f0[i].norm() / scale(i)).powi(2)).sum::<f64>().sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(t_end).max(1e-12 * t_end)
}

impl Solution {
    /// Index of the checkpoint at or before `t` (never the last when
    /// `t < t_end`).
    pub fn anchor_index(&self, t: f64) -> usize {
        let pos = self.checkpoints.partition_point(|c| c.t <= t);
        pos.saturating_sub(1).min(self.checkpoints.len() - 1)
    }

    /// State at an arbitrary `t ∈ [0, t_end]`: one step from the preceding
    /// checkpoint, whose size never exceeds an accepted step.
    pub fn eval<S: System>(&self, sys: &S, t: f64) -> Result<Vec<C64>> {
        self.eval_from(sys, self.anchor_index(t), t, 1)
    }

    /// State at `t` reached from checkpoint `anchor` in `substeps` equal
    /// steps. With a fixed anchor and step count the result is a smooth
    /// function of `t`, which finite-difference stencils rely on.
    pub fn eval_from<S: System>(&self, sys: &S, anchor: usize, t: f64, substeps: usize) -> Result<Vec<C64>> {
        if !(0.0..=self.t_end).contains(&t) {
            return Err(Error::OutOfRange { t, t_max: self.t_end });
        }
        let cp = &self.checkpoints[anchor];
        let dt = t - cp.t;
        if dt == 0.0 {
            return Ok(cp.y.clone());
        }
        let n = substeps.max(1);
        let h = dt / n as f64;
        let mut stepper = Stepper::new(cp.y.len());
        let mut y = cp.y.clone();
        let mut y_new = y.clone();
        // Error estimate is irrelevant here; tolerances only scale it.
        let tol = Tolerances { rtol: 1.0, atol: 1.0 };
        for i in 0..n {
            stepper.step(sys, cp.t + i as f64 * h, &y, h, tol, &mut y_new);
            std::mem::swap(&mut y, &mut y_new);
        }
        Ok(y)
    }

    /// Largest accepted step size.
    pub fn max_step(&self) -> f64 {
        self.checkpoints.windows(2).map(|w| w[1].t - w[0].t).fold(0.0, f64::max)
    }
}
