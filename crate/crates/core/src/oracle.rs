// SPDX-License-Identifier: Apache-2.0

//! Finite-difference derivatives used to cross-check analytic rates.
//!
//! Five-point stencils (fourth order) with one Richardson extrapolation
//! between steps `h` and `2h`. Near the ends of `[lo, hi]` the stencil
//! switches to the one-sided five-point formula.

use crate::error::Result;

/// Default step, in the natural time unit of the run.
pub const STEP: f64 = 1e-5;

pub fn derivative<F>(mut f: F, t: f64, h: f64, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if t - 4.0 * h >= lo && t + 4.0 * h <= hi {
        let mut central = |h: f64| -> Result<f64> {
            Ok((f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h))
        };
        let fine = central(h)?;
        let coarse = central(2.0 * h)?;
        Ok((16.0 * fine - coarse) / 15.0)
    } else {
        let dir = if t - 4.0 * h < lo { 1.0 } else { -1.0 };
        let mut one_sided = |h: f64| -> Result<f64> {
            let s = dir * h;
            let v = [f(t)?, f(t + s)?, f(t + 2.0 * s)?, f(t + 3.0 * s)?, f(t + 4.0 * s)?];
            Ok((-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * s))
        };
        let fine = one_sided(h)?;
        let coarse = one_sided(2.0 * h)?;
        Ok((16.0 * fine - coarse) / 15.0)
    }
}
