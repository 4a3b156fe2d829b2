// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures of the numerical library. Scenario/config failures live in
/// [`crate::scenario::ScenarioError`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unphysical initial state: |M|^2 = {m_abs2} exceeds N(N+1) = {bound}")]
    UnphysicalInit { m_abs2: f64, bound: f64 },

    #[error("covariance determinant is not positive")]
    NonPositiveDeterminant,

    #[error("dimension mismatch: {left} modes vs {right} modes")]
    DimensionMismatch { left: usize, right: usize },

    #[error("reference covariance is singular")]
    SingularReference,

    #[error("bad mode partition: {0}")]
    BadPartition(String),

    #[error("mode index {index} out of range for {n_modes} modes")]
    BadIndex { index: usize, n_modes: usize },

    #[error("malformed Gaussian state: {0}")]
    MalformedState(String),

    #[error("state violates the uncertainty bound: smallest symplectic eigenvalue {0}")]
    Unphysical(f64),

    #[error("spectral band is empty")]
    EmptyBand,

    #[error("invalid spectral preset: {0}")]
    InvalidPreset(String),

    #[error("invalid bath: {0}")]
    InvalidBath(String),

    #[error("integrator could not meet tolerances at t = {t} (step {step:e})")]
    ToleranceFailure { t: f64, step: f64 },

    #[error("time {t} outside trajectory range [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },

    #[error("g(t) vanishes at t = {t}; loss rate undefined")]
    VanishingG { t: f64 },

    #[error("dg/dt vanishes at t = {t}; per-mode currents undefined")]
    VanishingGdot { t: f64 },

    #[error("loss rate vanishes at t = {t}; current-integral form undefined")]
    VanishingGamma { t: f64 },

    #[error("bath amplitude derivative is singular at t = {t}")]
    SingularDerivative { t: f64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid ancilla configuration: {0}")]
    InvalidAncilla(String),
}
