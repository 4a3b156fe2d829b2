// SPDX-License-Identifier: Apache-2.0

//! Entropy production and its decomposition.
//!
//! Every quantity is a closed form in `|g|²`, the loss `Γ|g|² = −Re(g*ġ)`
//! and the initial parameters `(μ, N, M)`; the phase-space currents and
//! Gaussian functionals give independent routes to the same numbers.

mod ancilla;
mod closed_form;
mod currents;
mod record;

pub use ancilla::{
    ancilla_mutual_info, ancilla_rate, ancilla_rate_uncorrected, ancilla_relation_report, ancilla_state,
    ancilla_trajectory, AncillaConfig, AncillaRelation, AncillaRelationReport,
};
pub use closed_form::{
    entropy_flux, env_production_rate, env_production_rate_uncorrected, environment_entropy, mutual_info_rate,
    mutual_info_se, occupation, production_rate, srel_e_init, srel_s_vac, system_entropy, system_entropy_rate,
};
pub use currents::{
    current_e, current_e_full, current_integral_e, current_integral_s, current_s, current_s_full, eps_gamma,
    global_current_e, global_current_s, mode_currents, mutual_info_rate_currents,
};
pub use record::{conservation_check, record_at, EntropicRecord};
