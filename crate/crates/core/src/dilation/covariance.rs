// SPDX-License-Identifier: Apache-2.0

//! Full system + environment covariance, assembled from `(g, f_k)` and,
//! independently, propagated through `dΘ/dt = WΘ + ΘW†`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::aux::{AuxPoint, AuxTrajectory};
use super::bath::BathSpec;
use crate::error::{Error, Result};
use crate::gaussian::{state_from_init, vacuum_state, GaussianState, SystemInit};
use crate::ode::{self, System, Tolerances};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `Θ_SE` and the means at the instant described by `point`, ordered
/// `(a, a†, b₁, b₁†, …)`.
pub fn covariance_from_point(init: &SystemInit, point: &AuxPoint) -> Result<GaussianState> {
    let mut v = Vec::with_capacity(1 + point.f.len());
    v.push(point.g);
    v.extend(point.f.iter().copied());
    state_from_amplitudes(init, &v)
}

/// Gaussian state of the modes whose Heisenberg operators are `v_i a(0)` on
/// the initial product state.
///
/// Every 2×2 block `(i, j)` is
/// `[[N v_i v_j* + δ_ij/2, M v_i v_j], [M* v_i* v_j*, N v_i* v_j + δ_ij/2]]`
/// and the means are `(μ v_i, μ* v_i*)`. With `v = (g, f₁, …, f_K)` this is
/// the joint state; `v = (g)` and `v = (f₁, …, f_K)` give its marginals.
/// The state is physical whenever `Σ|v_i|² ≤ 1`, so only its structure is
/// validated.
pub fn state_from_amplitudes(init: &SystemInit, v: &[C64]) -> Result<GaussianState> {
    let modes = v.len();
    let (n, m, mu) = (init.n(), init.m(), init.mu());
    let mut cov = DMatrix::zeros(2 * modes, 2 * modes);
    let mut mean = DVector::zeros(2 * modes);
    for i in 0..modes {
        mean[2 * i] = mu * v[i];
        mean[2 * i + 1] = (mu * v[i]).conj();
        for j in 0..modes {
            let delta = if i == j { 0.5 } else { 0.0 };
            cov[(2 * i, 2 * j)] = n * v[i] * v[j].conj() + delta;
            cov[(2 * i, 2 * j + 1)] = m * v[i] * v[j];
            cov[(2 * i + 1, 2 * j)] = (m * v[i] * v[j]).conj();
            cov[(2 * i + 1, 2 * j + 1)] = n * v[i].conj() * v[j] + delta;
        }
    }
    GaussianState::new_unchecked_uncertainty(mean, cov)
}

pub fn assemble_covariance(init: &SystemInit, traj: &AuxTrajectory, t: f64) -> Result<GaussianState> {
    covariance_from_point(init, &traj.at(t)?)
}

/// The drift matrix `W(t)` of the Lyapunov equation: zero diagonal blocks,
/// `η_k = −iγ_k diag(e^{iΔ_k t}, −e^{−iΔ_k t})` in the system row and
/// `−η_k†` in the system column.
pub fn drift_matrix(bath: &BathSpec, t: f64) -> DMatrix<C64> {
    let k = bath.len();
    let mut w = DMatrix::zeros(2 + 2 * k, 2 + 2 * k);
    for (q, (eta_a, eta_b)) in etas(bath, t).into_iter().enumerate() {
        let col = 2 + 2 * q;
        w[(0, col)] = eta_a;
        w[(1, col + 1)] = eta_b;
        w[(col, 0)] = -eta_a.conj();
        w[(col + 1, 1)] = -eta_b.conj();
    }
    w
}

fn etas(bath: &BathSpec, t: f64) -> Vec<(C64, C64)> {
    bath.modes()
        .iter()
        .map(|m| {
            let phase = C64::from_polar(1.0, (bath.omega() - m.frequency) * t);
            (-I * m.coupling * phase, I * m.coupling * phase.conj())
        })
        .collect()
}

/// Flattened (column-major) covariance ODE exploiting the arrow structure of
/// `W`: only the system rows and columns couple to the bath.
struct LyapunovSystem<'a> {
    bath: &'a BathSpec,
    dim: usize,
}

impl System for LyapunovSystem<'_> {
    fn dim(&self) -> usize {
        self.dim * self.dim
    }

    fn rhs(&self, t: f64, y: &[C64], out: &mut [C64]) {
        let n = self.dim;
        let at = |i: usize, j: usize| y[i + j * n];
        let etas = etas(self.bath, t);
        // X = W Θ, row by row.
        let mut x = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut r0 = C64::new(0.0, 0.0);
            let mut r1 = C64::new(0.0, 0.0);
            for (q, (ea, eb)) in etas.iter().enumerate() {
                let row = 2 + 2 * q;
                r0 += ea * at(row, j);
                r1 += eb * at(row + 1, j);
                x[row + j * n] = -ea.conj() * at(0, j);
                x[row + 1 + j * n] = -eb.conj() * at(1, j);
            }
            x[j * n] = r0;
            x[1 + j * n] = r1;
        }
        for j in 0..n {
            for i in 0..n {
                out[i + j * n] = x[i + j * n] + x[j + i * n].conj();
            }
        }
    }
}

/// Integrates the Lyapunov equation from the product initial state and
/// returns `Θ_SE` at each time of `grid` (which must lie in `[0, t_max]`,
/// `t_max` being the largest grid time).
pub fn lyapunov_propagate(
    bath: &BathSpec,
    init: &SystemInit,
    grid: &[f64],
    tol: Tolerances,
) -> Result<Vec<DMatrix<C64>>> {
    let t_max = grid.iter().copied().fold(0.0, f64::max);
    let initial = state_from_init(init).product(&vacuum_state(bath.len()));
    if t_max == 0.0 {
        return Ok(grid.iter().map(|_| initial.cov().clone()).collect());
    }
    if grid.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::OutOfRange { t: grid.iter().copied().fold(f64::INFINITY, f64::min), t_max });
    }
    let dim = initial.cov().nrows();
    let sys = LyapunovSystem { bath, dim };
    let y0: Vec<C64> = initial.cov().iter().copied().collect();
    let sol = ode::integrate(&sys, y0, t_max, tol)?;
    grid.iter().map(|&t| sol.eval(&sys, t).map(|y| DMatrix::from_vec(dim, dim, y))).collect()
}

/// `|Θ_SE(t)| = (n̄ + ½)² / 4^K` for any time.
pub fn joint_determinant(init: &SystemInit, k: usize) -> f64 {
    init.det() / 4f64.powi(k as i32)
}

/// `|Θ_S(t)| = (N|g|² + ½)² − |M|²|g|⁴`.
pub fn system_determinant(init: &SystemInit, abs_g2: f64) -> f64 {
    (init.n() * abs_g2 + 0.5).powi(2) - init.m().norm_sqr() * abs_g2 * abs_g2
}

/// `|Θ_E(t)| = {[N(1−|g|²) + ½]² − |M|²(1−|g|²)²} / 4^{K−1}`.
pub fn environment_determinant(init: &SystemInit, abs_g2: f64, k: usize) -> f64 {
    let h = 1.0 - abs_g2;
    ((init.n() * h + 0.5).powi(2) - init.m().norm_sqr() * h * h) / 4f64.powi(k as i32 - 1)
}
