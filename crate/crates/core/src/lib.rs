// SPDX-License-Identifier: Apache-2.0

//! Gaussian dilation of the zero-temperature amplitude-damping channel.
//!
//! The crate builds the exact system + environment Gaussian dynamics of a
//! bosonic mode coupled to a bath of modes through an excitation-conserving
//! interaction, and evaluates the Wigner-entropic bookkeeping of that
//! evolution: entropy production, its split into bath production and
//! system–bath mutual information, the phase-space currents behind each term,
//! the entropy flux, and several non-Markovianity witnesses.
//!
//! * [`gaussian`]: Gaussian states and their closed-form entropic functionals.
//! * [`dilation`]: bath discretisation, auxiliary functions, joint covariance.
//! * [`production`]: entropy production, currents, conservation, ancilla.
//! * [`witnesses`]: non-Markovianity detection on sampled records.
//! * [`scenario`]: declarative runs, CSV output and the self-check suite.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dilation;
pub mod error;
pub mod gaussian;
pub mod ode;
pub mod oracle;
pub mod production;
pub mod scenario;
pub mod witnesses;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, LinearCurrent, SystemInit, C64};
