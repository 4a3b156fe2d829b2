// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Write};

use rayon::prelude::*;

use super::config::{BathConfig, OutputConfig, Scenario, ScenarioError, TimeGrid};
use crate::dilation::{discretize, integrate_aux, AuxTrajectory};
use crate::error::Result;
use crate::gaussian::SystemInit;
use crate::ode::Tolerances;
use crate::production::{eps_gamma, record_at, AncillaConfig, EntropicRecord};
use crate::witnesses::{witness_report, WitnessReport};

/// Environment variable capping the worker threads; 0 or unset means
/// automatic.
pub const THREADS_ENV: &str = "WIGNER_DILATION_THREADS";

/// Tolerance on the per-row decomposition and flux identities.
const ROW_TOL: f64 = 1e-8;

pub const COLUMNS: [&str; 20] = [
    "t",
    "re_g",
    "im_g",
    "abs_g2",
    "Gamma",
    "S_WS",
    "S_WE",
    "srel_S_vac",
    "srel_E_init",
    "I_SE",
    "Pi",
    "env_rate",
    "dI_SE_dt",
    "flux",
    "n_t",
    "I_AS",
    "dI_AS_dt",
    "int_Pi",
    "int_env_rate",
    "int_dI_SE",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<EntropicRecord>,
    pub witnesses: WitnessReport,
    pub eps_gamma: f64,
}

pub fn build_trajectory(s: &Scenario) -> Result<AuxTrajectory> {
    match &s.bath {
        BathConfig::Tim { kappa } => AuxTrajectory::markovian(*kappa, s.time.t_max),
        BathConfig::Discrete(bath) => integrate_aux(bath, s.time.t_max, s.integrator),
        BathConfig::Spectral(preset) => integrate_aux(&discretize(preset)?, s.time.t_max, s.integrator),
    }
}

pub(crate) fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// Records on the scenario grid, the witness report, and a re-check of the
/// row identities. Output is independent of the thread count.
pub fn run_scenario(s: &Scenario) -> Result<RunOutput, ScenarioError> {
    let traj = build_trajectory(s)?;
    let times = s.time.times();
    let records = thread_pool().install(|| {
        times
            .par_iter()
            .map(|&t| traj.at(t).map(|p| record_at(&s.system, &p, s.ancilla.as_ref())))
            .collect::<Result<Vec<_>>>()
    })?;
    for r in &records {
        let d = r.decomposition_residual();
        if !(d <= ROW_TOL) {
            return Err(ScenarioError::Invariant { t: r.t, what: "|Pi - env_rate - dI_SE_dt|", value: d });
        }
        let f = r.flux_residual();
        if !(f <= ROW_TOL) {
            return Err(ScenarioError::Invariant { t: r.t, what: "|flux - (dS_WS/dt - Pi)|", value: f });
        }
    }
    let eps = eps_gamma(&traj);
    let witnesses = witness_report(&records, eps)?;
    Ok(RunOutput { records, witnesses, eps_gamma: eps })
}

/// The thermal three-term comparison: Markovian bath with `κ = 1`, thermal
/// initial state of occupation `n`, `κt ∈ [0, 4]`, ancilla included.
pub fn fig1_preset(n: f64) -> Result<Scenario, ScenarioError> {
    let system =
        SystemInit::thermal(n).map_err(|e| ScenarioError::Invalid { field: "N".into(), message: e.to_string() })?;
    let ancilla = AncillaConfig::for_occupation(n)?;
    Ok(Scenario {
        system,
        bath: BathConfig::Tim { kappa: 1.0 },
        time: TimeGrid { t_max: 4.0, n_points: super::config::DEFAULT_POINTS },
        ancilla: Some(ancilla),
        integrator: Tolerances::default(),
        output: OutputConfig::default(),
    })
}

fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..y.len() {
        acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
        out.push(acc);
    }
    out
}

fn format_value(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

/// Writes the records as CSV with the fixed column set (or the requested
/// subset). Numbers carry 17 significant digits; absent values are empty.
pub fn write_csv<W: Write>(records: &[EntropicRecord], columns: Option<&[String]>, out: W) -> io::Result<()> {
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let int_pi = cumulative_trapezoid(&t, &records.iter().map(|r| r.pi).collect::<Vec<_>>());
    let int_env = cumulative_trapezoid(&t, &records.iter().map(|r| r.env_rate).collect::<Vec<_>>());
    let int_di = cumulative_trapezoid(&t, &records.iter().map(|r| r.di_se_dt).collect::<Vec<_>>());
    let selected: Vec<usize> = match columns {
        None => (0..COLUMNS.len()).collect(),
        Some(cols) => cols
            .iter()
            .map(|c| {
                COLUMNS
                    .iter()
                    .position(|k| k == c)
                    .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, format!("unknown column `{c}`")))
            })
            .collect::<io::Result<_>>()?,
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(selected.iter().map(|&i| COLUMNS[i]))?;
    for (i, r) in records.iter().enumerate() {
        let row: [Option<f64>; 20] = [
            Some(r.t),
            Some(r.re_g),
            Some(r.im_g),
            Some(r.abs_g2),
            r.gamma,
            Some(r.s_ws),
            Some(r.s_we),
            Some(r.srel_s_vac),
            Some(r.srel_e_init),
            Some(r.i_se),
            Some(r.pi),
            Some(r.env_rate),
            Some(r.di_se_dt),
            Some(r.flux),
            Some(r.n_t),
            r.i_as,
            r.di_as_dt,
            Some(int_pi[i]),
            Some(int_env[i]),
            Some(int_di[i]),
        ];
        w.write_record(selected.iter().map(|&c| format_value(row[c])))?;
    }
    w.flush()
}
