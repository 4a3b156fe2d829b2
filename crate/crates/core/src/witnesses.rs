// SPDX-License-Identifier: Apache-2.0

//! Non-Markovianity witnesses: negativity of `Γ`, reversals of the two
//! relative entropies, entropy backflow into the system and revivals of the
//! system–ancilla information.
//!
//! Events are read off consecutive grid points; a change counts once it
//! exceeds [`EVENT_THRESHOLD`].

use serde::Serialize;

use crate::dilation::AuxTrajectory;
use crate::error::{Error, Result};
use crate::production::EntropicRecord;

pub const EVENT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    /// Midpoint of the grid step on which the change happened.
    pub t: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaWitness {
    pub intervals: Vec<(f64, f64)>,
    /// `∫ max(0, −Γ) dt` by the trapezoidal rule on the grid.
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub gamma_negative_intervals: Vec<(f64, f64)>,
    pub gamma_measure: f64,
    pub srel_s_reversals: Vec<Event>,
    pub srel_e_reversals: Vec<Event>,
    pub flux_backflow_intervals: Vec<(f64, f64)>,
    pub ancilla_revival_intervals: Vec<(f64, f64)>,
    pub markovian: bool,
}

/// Maximal runs of flagged points, each reported as `(first, last)` time.
fn point_runs(times: &[f64], flags: &[bool]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &on) in flags.iter().enumerate() {
        match (on, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((times[s], times[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((times[s], times[times.len() - 1]));
    }
    out
}

/// Maximal runs of flagged steps `[t_i, t_{i+1}]`, merged into intervals.
fn step_runs(times: &[f64], flags: &[bool]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, _) in flags.iter().enumerate().filter(|(_, on)| **on) {
        match out.last_mut() {
            Some(last) if last.1 == times[i] => last.1 = times[i + 1],
            _ => out.push((times[i], times[i + 1])),
        }
    }
    out
}

/// Intervals of `grid` where `Γ < −eps`. Points where `Γ` is undefined
/// (`|g| ≤ ε_g`) neither open nor close an interval on their own.
pub fn gamma_witness(traj: &AuxTrajectory, grid: &[f64], eps: f64) -> Result<GammaWitness> {
    let gammas = grid.iter().map(|&t| traj.at(t).map(|p| p.gamma)).collect::<Result<Vec<_>>>()?;
    Ok(gamma_witness_from_samples(grid, &gammas, eps))
}

pub fn gamma_witness_from_samples(times: &[f64], gammas: &[Option<f64>], eps: f64) -> GammaWitness {
    let mut flags: Vec<bool> = gammas.iter().map(|g| g.is_some_and(|g| g < -eps)).collect();
    // An undefined point between two negative neighbours stays inside the run.
    for i in 1..flags.len().saturating_sub(1) {
        if gammas[i].is_none() && flags[i - 1] && flags[i + 1] {
            flags[i] = true;
        }
    }
    let neg = |g: &Option<f64>| g.map_or(0.0, |g| (-g).max(0.0));
    let measure =
        times.windows(2).zip(gammas.windows(2)).map(|(t, g)| 0.5 * (t[1] - t[0]) * (neg(&g[0]) + neg(&g[1]))).sum();
    GammaWitness { intervals: point_runs(times, &flags), measure }
}

fn reversals(records: &[EntropicRecord], value: impl Fn(&EntropicRecord) -> f64, sign: f64) -> Vec<Event> {
    records
        .windows(2)
        .filter_map(|w| {
            let change = sign * (value(&w[1]) - value(&w[0]));
            (change > EVENT_THRESHOLD).then(|| Event { t: 0.5 * (w[0].t + w[1].t), magnitude: change })
        })
        .collect()
}

/// Returns `(srel_S increases, srel_E decreases)`.
pub fn monotonicity_witness(records: &[EntropicRecord]) -> Result<(Vec<Event>, Vec<Event>)> {
    if records.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: records.len() });
    }
    Ok((reversals(records, |r| r.srel_s_vac, 1.0), reversals(records, |r| r.srel_e_init, -1.0)))
}

/// Intervals where `Φ > EVENT_THRESHOLD`, i.e. entropy flows back into the
/// system.
pub fn flux_backflow_witness(records: &[EntropicRecord]) -> Vec<(f64, f64)> {
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let flags: Vec<bool> = records.iter().map(|r| r.flux > EVENT_THRESHOLD).collect();
    point_runs(&times, &flags)
}

/// Grid steps on which `I_AS` grows, merged into intervals. Empty without an
/// ancilla.
pub fn ancilla_witness(records: &[EntropicRecord]) -> Vec<(f64, f64)> {
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let flags: Vec<bool> = records
        .windows(2)
        .map(|w| match (w[0].i_as, w[1].i_as) {
            (Some(a), Some(b)) => b - a > EVENT_THRESHOLD,
            _ => false,
        })
        .collect();
    step_runs(&times, &flags)
}

/// Runs all four witnesses on the record grid.
pub fn witness_report(records: &[EntropicRecord], eps_gamma: f64) -> Result<WitnessReport> {
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let gammas: Vec<Option<f64>> = records.iter().map(|r| r.gamma).collect();
    let gamma = gamma_witness_from_samples(&times, &gammas, eps_gamma);
    let (srel_s_reversals, srel_e_reversals) = monotonicity_witness(records)?;
    let flux_backflow_intervals = flux_backflow_witness(records);
    let ancilla_revival_intervals = ancilla_witness(records);
    let markovian = gamma.intervals.is_empty()
        && srel_s_reversals.is_empty()
        && srel_e_reversals.is_empty()
        && flux_backflow_intervals.is_empty()
        && ancilla_revival_intervals.is_empty();
    Ok(WitnessReport {
        gamma_negative_intervals: gamma.intervals,
        gamma_measure: gamma.measure,
        srel_s_reversals,
        srel_e_reversals,
        flux_backflow_intervals,
        ancilla_revival_intervals,
        markovian,
    })
}
