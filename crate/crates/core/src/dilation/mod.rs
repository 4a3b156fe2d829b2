// SPDX-License-Identifier: Apache-2.0

//! Exact excitation-conserving dilation of zero-temperature amplitude
//! damping: bath description, auxiliary functions and the joint covariance.

mod aux;
mod bath;
mod covariance;

pub use aux::{gamma_rate, integrate_aux, tim_aux, AuxPoint, AuxTrajectory, LocalSampler, EPS_G};
pub use bath::{
    discretize, memory_kernel, BathMode, BathSpec, SpectralPreset, SpectralShape, DEFAULT_HALF_BAND, DEFAULT_MODES,
};
pub use covariance::{
    assemble_covariance, covariance_from_point, drift_matrix, environment_determinant, joint_determinant,
    lyapunov_propagate, state_from_amplitudes, system_determinant,
};
