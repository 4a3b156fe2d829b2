// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::ancilla::{ancilla_mutual_info, ancilla_rate, AncillaConfig};
use super::closed_form::*;
use crate::dilation::{assemble_covariance, AuxPoint, AuxTrajectory};
use crate::error::Result;
use crate::gaussian::{relative_entropy, vacuum_state, SystemInit};

/// Every entropic quantity of the run at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropicRecord {
    pub t: f64,
    pub re_g: f64,
    pub im_g: f64,
    pub abs_g2: f64,
    pub gamma: Option<f64>,
    pub s_ws: f64,
    pub s_we: f64,
    pub srel_s_vac: f64,
    pub srel_e_init: f64,
    pub i_se: f64,
    pub pi: f64,
    pub env_rate: f64,
    pub di_se_dt: f64,
    pub ds_ws_dt: f64,
    pub flux: f64,
    pub n_t: f64,
    pub i_as: Option<f64>,
    pub di_as_dt: Option<f64>,
}

impl EntropicRecord {
    /// `|Π − dS(W_E‖W_E(0))/dt − dI_SE/dt|`.
    pub fn decomposition_residual(&self) -> f64 {
        (self.pi - self.env_rate - self.di_se_dt).abs()
    }

    /// `|Φ − (dS(W_S)/dt − Π)|`.
    pub fn flux_residual(&self) -> f64 {
        (self.flux - (self.ds_ws_dt - self.pi)).abs()
    }
}

pub fn record_at(init: &SystemInit, point: &AuxPoint, ancilla: Option<&AncillaConfig>) -> EntropicRecord {
    let x = point.abs_g2();
    EntropicRecord {
        t: point.t,
        re_g: point.g.re,
        im_g: point.g.im,
        abs_g2: x,
        gamma: point.gamma,
        s_ws: system_entropy(init, x),
        s_we: environment_entropy(init, x, point.n_bath()),
        srel_s_vac: srel_s_vac(init, x),
        srel_e_init: srel_e_init(init, x),
        i_se: mutual_info_se(init, x),
        pi: production_rate(init, point),
        env_rate: env_production_rate(init, point),
        di_se_dt: mutual_info_rate(init, point),
        ds_ws_dt: system_entropy_rate(init, point),
        flux: entropy_flux(init, point),
        n_t: occupation(init, x),
        i_as: ancilla.map(|a| ancilla_mutual_info(a.n(), x)),
        di_as_dt: ancilla.map(|a| ancilla_rate(a.n(), point)),
    }
}

/// Largest drift over `grid` of `S(W_SE(t) ‖ vacuum)`, the relative entropy to
/// the product of the system's stationary state and the initial bath state.
pub fn conservation_check(init: &SystemInit, traj: &AuxTrajectory, grid: &[f64]) -> Result<f64> {
    let reference = vacuum_state(1 + traj.n_bath());
    let initial = relative_entropy(&assemble_covariance(init, traj, 0.0)?, &reference)?;
    let mut worst: f64 = 0.0;
    for &t in grid {
        let value = relative_entropy(&assemble_covariance(init, traj, t)?, &reference)?;
        worst = worst.max((value - initial).abs());
    }
    Ok(worst)
}
