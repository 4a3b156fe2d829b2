// SPDX-License-Identifier: Apache-2.0

//! Phase-space currents in canonical linear form.
//!
//! The continuity equations read `∂_t W = ∂_ξ J + c.c.`. The reduced currents
//! come in two flavours: the dissipative ones (rate `Γ`) entering the
//! current-integral forms of `Π` and the bath production, and the full ones
//! (complex rate `−ġ/g`, Lamb shift included) obtained by marginalising the
//! global unitary currents.

use nalgebra::DVector;

use crate::dilation::{covariance_from_point, state_from_amplitudes, AuxPoint, AuxTrajectory, EPS_G};
use crate::error::{Error, Result};
use crate::gaussian::{derivative_to_linear, moment_form, GaussianState, LinearCurrent, SystemInit, C64};

fn system_state(init: &SystemInit, point: &AuxPoint) -> Result<GaussianState> {
    state_from_amplitudes(init, &[point.g])
}

fn environment_state(init: &SystemInit, point: &AuxPoint) -> Result<GaussianState> {
    state_from_amplitudes(init, point.f.as_slice())
}

/// Current of `rate · (α + ½ ∂_{α*}) W_S`.
fn system_current(init: &SystemInit, point: &AuxPoint, rate: C64) -> Result<LinearCurrent> {
    let state = system_state(init, point)?;
    let mut coeffs = DVector::zeros(2);
    coeffs[0] = C64::new(0.5, 0.0);
    let mut l = derivative_to_linear(&state, &coeffs)?;
    l[0] += 1.0;
    let d = init.mu() * point.g;
    LinearCurrent::new(d, l, state).map(|c| c.scaled(rate))
}

/// `J_S = Γ(α + ½∂_{α*}) W_S`.
pub fn current_s(init: &SystemInit, point: &AuxPoint) -> Result<LinearCurrent> {
    let gamma = point.gamma()?;
    system_current(init, point, C64::new(gamma, 0.0))
}

/// The marginal of the global system current: rate `−ġ/g` in place of `Γ`.
pub fn current_s_full(init: &SystemInit, point: &AuxPoint) -> Result<LinearCurrent> {
    if point.g.norm() <= EPS_G {
        return Err(Error::VanishingG { t: point.t });
    }
    system_current(init, point, -point.gdot / point.g)
}

/// `prefactor · ∫ α W_SE dα`, written over the bath coordinates.
fn environment_current(init: &SystemInit, point: &AuxPoint, prefactor: C64) -> Result<LinearCurrent> {
    let state = environment_state(init, point)?;
    let k = point.n_bath();
    let mut u = DVector::zeros(2 * k);
    for (q, f) in point.f.iter().enumerate() {
        u[2 * q] = init.n() * f.conj();
        u[2 * q + 1] = init.m() * f;
    }
    // uᵀ Θ_E⁻¹ is minus the linear form of the derivative coefficients u.
    let l = -derivative_to_linear(&state, &u)?;
    LinearCurrent::new(init.mu(), l, state).map(|c| c.scaled(prefactor))
}

/// Collective bath current with the dissipative prefactor `−Γg`.
pub fn current_e(init: &SystemInit, point: &AuxPoint) -> Result<LinearCurrent> {
    let gamma = point.gamma()?;
    environment_current(init, point, -gamma * point.g)
}

/// Collective bath current with prefactor `ġ`: the marginal of the global
/// bath current.
pub fn current_e_full(init: &SystemInit, point: &AuxPoint) -> Result<LinearCurrent> {
    environment_current(init, point, point.gdot)
}

/// Per-mode split `J_k = −(ḟ_k/ġ) J_E` of [`current_e_full`].
pub fn mode_currents(init: &SystemInit, point: &AuxPoint) -> Result<Vec<LinearCurrent>> {
    if point.gdot.norm() <= EPS_G {
        return Err(Error::VanishingGdot { t: point.t });
    }
    let fdot = point.fdot()?;
    let collective = current_e_full(init, point)?;
    Ok(fdot.iter().map(|fd| collective.scaled(-fd / point.gdot)).collect())
}

/// Global system current on `W_SE`: `d = μ Σ_k ḟ_k* f_k / g*`,
/// `L_{β_k} = ḟ_k* / g*`.
pub fn global_current_s(init: &SystemInit, point: &AuxPoint) -> Result<LinearCurrent> {
    if point.g.norm() <= EPS_G {
        return Err(Error::VanishingG { t: point.t });
    }
    let fdot = point.fdot()?;
    let joint = covariance_from_point(init, point)?;
    let gc = point.g.conj();
    let mut l = DVector::zeros(2 + 2 * point.n_bath());
    let mut d = C64::new(0.0, 0.0);
    for (q, (fd, f)) in fdot.iter().zip(point.f.iter()).enumerate() {
        l[2 + 2 * q] = fd.conj() / gc;
        d += fd.conj() * f / gc;
    }
    LinearCurrent::new(init.mu() * d, l, joint)
}

/// Global bath current on `W_SE`: `d = ġμ`, `L_α = ġ/g`.
pub fn global_current_e(init: &SystemInit, point: &AuxPoint) -> Result<LinearCurrent> {
    if point.g.norm() <= EPS_G {
        return Err(Error::VanishingG { t: point.t });
    }
    let joint = covariance_from_point(init, point)?;
    let mut l = DVector::zeros(2 + 2 * point.n_bath());
    l[0] = point.gdot / point.g;
    LinearCurrent::new(point.gdot * init.mu(), l, joint)
}

/// Threshold `ε_Γ` below which `4/Γ` prefactors are not evaluated:
/// `1e-9 κ` for Markovian trajectories, `1e-9 max|Γ|` otherwise.
pub fn eps_gamma(traj: &AuxTrajectory) -> f64 {
    let scale =
        traj.kappa().unwrap_or_else(|| traj.points().iter().filter_map(|p| p.gamma).map(f64::abs).fold(0.0, f64::max));
    (1e-9 * scale).max(f64::MIN_POSITIVE)
}

fn checked_gamma(point: &AuxPoint, eps: f64) -> Result<f64> {
    let gamma = point.gamma()?;
    if gamma.abs() <= eps {
        return Err(Error::VanishingGamma { t: point.t });
    }
    Ok(gamma)
}

/// `(4/Γ) ∫ |J_S|² / W_S`.
pub fn current_integral_s(init: &SystemInit, point: &AuxPoint, eps: f64) -> Result<f64> {
    let gamma = checked_gamma(point, eps)?;
    Ok(4.0 / gamma * moment_form(&current_s(init, point)?))
}

/// `(4/Γ) ∫ |J_E|² / W_E`.
pub fn current_integral_e(init: &SystemInit, point: &AuxPoint, eps: f64) -> Result<f64> {
    let gamma = checked_gamma(point, eps)?;
    Ok(4.0 / gamma * moment_form(&current_e(init, point)?))
}

/// `(4/Γ) E_{W_SE}[|J_S/W_S|² − |J_E/W_E|²]`, with both velocities lifted
/// onto the joint state.
pub fn mutual_info_rate_currents(init: &SystemInit, point: &AuxPoint, eps: f64) -> Result<f64> {
    let gamma = checked_gamma(point, eps)?;
    let joint = covariance_from_point(init, point)?;
    let bath: Vec<usize> = (1..=point.n_bath()).collect();
    let js = current_s(init, point)?.embed(&joint, &[0])?;
    let je = current_e(init, point)?.embed(&joint, &bath)?;
    Ok(4.0 / gamma * (moment_form(&js) - moment_form(&je)))
}
