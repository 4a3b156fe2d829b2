// SPDX-License-Identifier: Apache-2.0

//! Declarative scenarios: a JSON document naming the initial state, the bath
//! and the time grid, turned into records, a witness report and CSV.

mod check;
mod config;
mod run;

pub use check::{run_checks, CheckLine, CheckReport};
pub use config::{parse_scenario, BathConfig, OutputConfig, Scenario, ScenarioError, TimeGrid};
pub use run::{build_trajectory, fig1_preset, run_scenario, write_csv, RunOutput, COLUMNS, THREADS_ENV};
