// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wigner_dilation::scenario::{
    fig1_preset, parse_scenario, run_checks, run_scenario, write_csv, Scenario, ScenarioError,
};
use wigner_dilation::witnesses::WitnessReport;

const EXIT_CONFIG: u8 = 2;
const EXIT_PHYSICS: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "wigner-dilation",
    version,
    about = "Entropy production of a damped bosonic mode from its exact dilation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its trajectory table as CSV.
    Run {
        config: PathBuf,
        /// CSV destination; defaults to `output.path` or stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the witness report as JSON to this path.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Thermal three-term preset with κ = 1 and κt ∈ [0, 4].
    Fig1 {
        #[arg(long = "N")]
        n: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run the invariant and oracle suite and print the deviations.
    Check { config: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match e {
            ScenarioError::Parse { .. } | ScenarioError::UnknownBathType(_) | ScenarioError::Invalid { .. } => {
                EXIT_CONFIG
            }
            ScenarioError::UnphysicalInit { .. } | ScenarioError::Physics(_) => EXIT_PHYSICS,
            ScenarioError::Invariant { .. } => EXIT_INVARIANT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    if e.kind() == io::ErrorKind::BrokenPipe {
        // The reader went away (e.g. `| head`); nothing left to report.
        std::process::exit(0);
    }
    Failure { code: EXIT_CONFIG, message: format!("{}: {e}", path.display()) }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(parse_scenario(&text)?)
}

fn summary(w: &WitnessReport) -> String {
    format!(
        "witnesses: markovian={} gamma_negative_intervals={} gamma_measure={:.6e} srel_S_reversals={} \
         srel_E_reversals={} flux_backflow_intervals={} ancilla_revival_intervals={}",
        w.markovian,
        w.gamma_negative_intervals.len(),
        w.gamma_measure,
        w.srel_s_reversals.len(),
        w.srel_e_reversals.len(),
        w.flux_backflow_intervals.len(),
        w.ancilla_revival_intervals.len()
    )
}

fn execute(s: &Scenario, output: Option<PathBuf>, witness: Option<PathBuf>) -> Result<(), Failure> {
    let run = run_scenario(s)?;
    let columns = s.output.columns.as_deref();
    match output.or_else(|| s.output.path.clone()) {
        Some(path) => {
            let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
            write_csv(&run.records, columns, BufWriter::new(file)).map_err(|e| io_failure(&path, e))?;
        }
        None => {
            let stdout = io::stdout();
            write_csv(&run.records, columns, stdout.lock()).map_err(|e| io_failure(Path::new("<stdout>"), e))?;
        }
    }
    if let Some(path) = witness {
        let json = serde_json::to_string_pretty(&run.witnesses).expect("witness report serialises");
        std::fs::write(&path, json + "\n").map_err(|e| io_failure(&path, e))?;
    }
    eprintln!("{}", summary(&run.witnesses));
    Ok(())
}

fn main_inner(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, output, witness } => execute(&load(&config)?, output, witness),
        Command::Fig1 { n, output, witness } => execute(&fig1_preset(n)?, output, witness),
        Command::Check { config } => {
            let report = run_checks(&load(&config)?)?;
            let mut out = io::stdout().lock();
            let _ = out.write_all(report.render().as_bytes());
            if report.passed() {
                Ok(())
            } else {
                Err(Failure { code: EXIT_INVARIANT, message: "one or more checks failed".into() })
            }
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
