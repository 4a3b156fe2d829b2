// SPDX-License-Identifier: Apache-2.0

//! An ancilla `A` two-mode squeezed with the system, so that the thermal
//! initial state of `S` is the marginal of a pure `AS` state.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::closed_form::{env_production_rate, mutual_info_rate, production_rate};
use crate::dilation::{AuxPoint, AuxTrajectory};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, SystemInit, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaConfig {
    z: f64,
}

impl AncillaConfig {
    pub fn new(z: f64) -> Result<Self> {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::InvalidAncilla(format!("squeezing must be finite and >= 0, got {z}")));
        }
        Ok(Self { z })
    }

    /// The squeezing that purifies a thermal state of occupation `n`.
    pub fn for_occupation(n: f64) -> Result<Self> {
        if !n.is_finite() || n < 0.0 {
            return Err(Error::InvalidAncilla(format!("occupation must be finite and >= 0, got {n}")));
        }
        Self::new(n.sqrt().asinh())
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// `N = sinh² z`.
    pub fn n(&self) -> f64 {
        self.z.sinh().powi(2)
    }

    /// Off-diagonal magnitude of `Θ_AS(0)`: `sinh z cosh z = √(N(N+1))`.
    pub fn coupling(&self) -> f64 {
        self.z.sinh() * self.z.cosh()
    }

    /// The thermal system state this ancilla purifies.
    pub fn system_init(&self) -> SystemInit {
        SystemInit::thermal(self.n()).expect("sinh² is non-negative")
    }
}

/// `Θ_AS(t)` ordered `(c, c†, a, a†)`: the ancilla is untouched and the
/// cross-correlations decay with `g`.
pub fn ancilla_state(cfg: &AncillaConfig, g: C64) -> Result<GaussianState> {
    let n = cfg.n();
    let s = cfg.coupling();
    let x = g.norm_sqr();
    let mut cov = DMatrix::zeros(4, 4);
    cov[(0, 0)] = C64::new(n + 0.5, 0.0);
    cov[(1, 1)] = C64::new(n + 0.5, 0.0);
    cov[(2, 2)] = C64::new(n * x + 0.5, 0.0);
    cov[(3, 3)] = C64::new(n * x + 0.5, 0.0);
    cov[(0, 3)] = s * g;
    cov[(3, 0)] = s * g.conj();
    cov[(1, 2)] = s * g.conj();
    cov[(2, 1)] = s * g;
    GaussianState::new(DVector::zeros(4), cov)
}

/// `I_AS = ln[2(N + ½)(N|g|² + ½) / (N(1 − |g|²) + ½)]`.
pub fn ancilla_mutual_info(n: f64, abs_g2: f64) -> f64 {
    (2.0 * (n + 0.5) * (n * abs_g2 + 0.5) / (n * (1.0 - abs_g2) + 0.5)).ln()
}

/// `dI_AS/dt = −2Γ|g|² N(N+1) / [(N|g|² + ½)(N(1 − |g|²) + ½)]`.
pub fn ancilla_rate(n: f64, point: &AuxPoint) -> f64 {
    ancilla_rate_uncorrected(n, point) * 2.0
}

/// The same rate without the factor 2 that the chain rule through
/// `d|g|²/dt = −2Γ|g|²` produces.
pub fn ancilla_rate_uncorrected(n: f64, point: &AuxPoint) -> f64 {
    let x = point.abs_g2();
    -point.loss() * n * (n + 1.0) / ((n * x + 0.5) * (n * (1.0 - x) + 0.5))
}

/// `(t, I_AS, dI_AS/dt)` on the stored points of `traj`.
pub fn ancilla_trajectory(cfg: &AncillaConfig, traj: &AuxTrajectory) -> Vec<(f64, f64, f64)> {
    let n = cfg.n();
    traj.points().iter().map(|p| (p.t, ancilla_mutual_info(n, p.abs_g2()), ancilla_rate(n, p))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AncillaRelation {
    pub label: &'static str,
    /// Reference prefactor of the relation.
    pub prefactor: f64,
    /// The entropic rate the prefactor multiplies.
    pub quantity: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when the right-hand side vanishes.
    pub ratio: Option<f64>,
    /// `lhs / quantity`, the prefactor that would make the relation hold.
    pub consistent_prefactor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AncillaRelationReport {
    pub t: f64,
    pub abs_g2: f64,
    /// `dI_AS/dt` from the closed form.
    pub lhs: f64,
    pub lhs_uncorrected: f64,
    pub relations: [AncillaRelation; 3],
    /// The first two prefactors are non-positive and the third has the sign
    /// of `1 − 2|g|²`.
    pub signs_ok: bool,
}

fn safe_div(num: f64, den: f64) -> Option<f64> {
    (den.abs() > 1e-12 * num.abs().max(f64::MIN_POSITIVE)).then(|| num / den)
}

pub fn ancilla_relation_report(cfg: &AncillaConfig, point: &AuxPoint) -> AncillaRelationReport {
    let n = cfg.n();
    let init = cfg.system_init();
    let x = point.abs_g2();
    let lhs = ancilla_rate(n, point);
    let scale = 2.0 * n / (n + 1.0);
    let entries = [
        ("Pi", -scale * x * (n * (1.0 - x) + 0.5), production_rate(&init, point)),
        ("env_rate", -scale * (1.0 - x) * (n * x + 0.5), env_production_rate(&init, point)),
        ("dI_SE_dt", n / (n + 1.0) * (1.0 - 2.0 * x), mutual_info_rate(&init, point)),
    ];
    let relations = entries.map(|(label, prefactor, quantity)| {
        let rhs = prefactor * quantity;
        AncillaRelation {
            label,
            prefactor,
            quantity,
            rhs,
            ratio: safe_div(lhs, rhs),
            consistent_prefactor: safe_div(lhs, quantity),
        }
    });
    let third_sign = relations[2].prefactor * (1.0 - 2.0 * x) >= 0.0;
    let signs_ok = relations[0].prefactor <= 0.0 && relations[1].prefactor <= 0.0 && third_sign;
    AncillaRelationReport {
        t: point.t,
        abs_g2: x,
        lhs,
        lhs_uncorrected: ancilla_rate_uncorrected(n, point),
        relations,
        signs_ok,
    }
}
