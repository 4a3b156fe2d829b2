// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use super::run::COLUMNS;
use crate::dilation::{BathMode, BathSpec, SpectralPreset, SpectralShape, DEFAULT_HALF_BAND, DEFAULT_MODES};
use crate::error::Error;
use crate::gaussian::{SystemInit, C64};
use crate::ode::Tolerances;
use crate::production::AncillaConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    /// Malformed document or a field of the wrong type. `line` and `column`
    /// are 1-based; both are 0 when the position is unknown.
    #[error("{}{path}: {message}", location(*line, *column))]
    Parse { line: usize, column: usize, path: String, message: String },
    #[error("unknown bath type `{0}` (expected tim, discrete or spectral)")]
    UnknownBathType(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("unphysical initial state: |M|^2 = {m_abs2} exceeds N(N+1) = {bound}")]
    UnphysicalInit { m_abs2: f64, bound: f64 },
    #[error("{0}")]
    Physics(#[from] Error),
    #[error("invariant violated at t = {t}: {what} = {value:e}")]
    Invariant { t: f64, what: &'static str, value: f64 },
}

fn location(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}, column {column}: ")
    }
}

fn invalid(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGrid {
    /// `n_points` equally spaced times from 0 to `t_max` inclusive.
    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.t_max } else { self.t_max * i as f64 / last })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathConfig {
    /// Time-independent Markovian limit `g = e^{−κt}`.
    Tim {
        kappa: f64,
    },
    Discrete(BathSpec),
    Spectral(SpectralPreset),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    /// Subset of [`COLUMNS`] to emit, in the given order.
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub system: SystemInit,
    pub bath: BathConfig,
    pub time: TimeGrid,
    pub ancilla: Option<AncillaConfig>,
    pub integrator: Tolerances,
    pub output: OutputConfig,
}

pub const DEFAULT_POINTS: usize = 300;

/// Upper bound on `n_points`, to keep a typo from allocating without limit.
pub const MAX_POINTS: usize = 10_000_000;

#[derive(Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<RawComplex> for C64 {
    fn from(c: RawComplex) -> Self {
        match c {
            RawComplex::Real(re) => C64::new(re, 0.0),
            RawComplex::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    system: RawSystem,
    bath: Value,
    time: RawTime,
    #[serde(default)]
    ancilla: Option<RawAncilla>,
    #[serde(default)]
    integrator: Option<RawIntegrator>,
    #[serde(default)]
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    mu: Option<RawComplex>,
    #[serde(rename = "N")]
    n: Option<f64>,
    #[serde(rename = "M")]
    m: Option<RawComplex>,
    nbar: Option<f64>,
    r: Option<f64>,
    theta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_max: f64,
    n_points: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAncilla {
    enabled: Option<bool>,
    z: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    rtol: Option<f64>,
    atol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    columns: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTim {
    kappa: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiscrete {
    #[serde(default)]
    omega: f64,
    modes: Vec<BathMode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectral {
    #[serde(default)]
    omega: f64,
    density: SpectralShape,
    band: Option<(f64, f64)>,
    k: Option<usize>,
}

fn from_text<T: DeserializeOwned>(text: &str) -> Result<T, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse { line: inner.line(), column: inner.column(), path, message: strip_position(&inner) }
    })?;
    de.end().map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: strip_position(&e),
    })?;
    Ok(value)
}

fn from_value<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, ScenarioError> {
    serde_path_to_error::deserialize(value).map_err(|e| ScenarioError::Parse {
        line: 0,
        column: 0,
        path: format!("{prefix}.{}", e.path()),
        message: e.into_inner().to_string(),
    })
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn finite(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, "must be finite"))
    }
}

fn positive(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

/// Parses a scenario document. Never panics: every malformed input maps to a
/// [`ScenarioError`].
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = from_text(text)?;
    let system = build_system(raw.system)?;
    let bath = build_bath(raw.bath)?;
    let t_max = positive("time.t_max", raw.time.t_max)?;
    let n_points = raw.time.n_points.unwrap_or(DEFAULT_POINTS);
    if !(2..=MAX_POINTS).contains(&n_points) {
        return Err(invalid("time.n_points", format!("must lie in [2, {MAX_POINTS}], got {n_points}")));
    }
    let integrator = match raw.integrator {
        None => Tolerances::default(),
        Some(i) => {
            let d = Tolerances::default();
            Tolerances {
                rtol: positive("integrator.rtol", i.rtol.unwrap_or(d.rtol))?,
                atol: positive("integrator.atol", i.atol.unwrap_or(d.atol))?,
            }
        }
    };
    let ancilla = match raw.ancilla {
        Some(a) if a.enabled.unwrap_or(true) => Some(build_ancilla(&system, a.z)?),
        _ => None,
    };
    let output = match raw.output {
        None => OutputConfig::default(),
        Some(o) => {
            if let Some(cols) = &o.columns {
                if cols.is_empty() {
                    return Err(invalid("output.columns", "must name at least one column"));
                }
                if let Some(bad) = cols.iter().find(|c| !COLUMNS.contains(&c.as_str())) {
                    return Err(invalid("output.columns", format!("unknown column `{bad}`")));
                }
            }
            OutputConfig { path: o.path.map(PathBuf::from), columns: o.columns }
        }
    };
    Ok(Scenario { system, bath, time: TimeGrid { t_max, n_points }, ancilla, integrator, output })
}

fn build_system(raw: RawSystem) -> Result<SystemInit, ScenarioError> {
    let mu: C64 = raw.mu.map(Into::into).unwrap_or_default();
    finite("system.mu", mu.re).and(finite("system.mu", mu.im))?;
    let squeezed_form = raw.nbar.is_some() || raw.r.is_some() || raw.theta.is_some();
    let moment_form = raw.n.is_some() || raw.m.is_some();
    if squeezed_form && moment_form {
        return Err(invalid("system", "give either (N, M) or (nbar, r, theta), not both"));
    }
    if squeezed_form {
        let nbar = finite("system.nbar", raw.nbar.unwrap_or(0.0))?;
        let r = finite("system.r", raw.r.unwrap_or(0.0))?;
        let theta = finite("system.theta", raw.theta.unwrap_or(0.0))?;
        return SystemInit::from_squeezed_thermal(mu, nbar, r, theta).map_err(|e| invalid("system", e.to_string()));
    }
    let n = finite("system.N", raw.n.unwrap_or(0.0))?;
    let m: C64 = raw.m.map(Into::into).unwrap_or_default();
    finite("system.M", m.re).and(finite("system.M", m.im))?;
    SystemInit::new(mu, n, m).map_err(|e| match e {
        Error::UnphysicalInit { m_abs2, bound } => ScenarioError::UnphysicalInit { m_abs2, bound },
        other => invalid("system", other.to_string()),
    })
}

fn build_bath(value: Value) -> Result<BathConfig, ScenarioError> {
    let Value::Object(map) = value else {
        return Err(invalid("bath", "must be an object with exactly one of tim, discrete, spectral"));
    };
    if map.len() != 1 {
        return Err(invalid("bath", format!("exactly one bath type is required, found {}", map.len())));
    }
    let (kind, body) = map.into_iter().next().expect("one entry");
    match kind.as_str() {
        "tim" => {
            let raw: RawTim = from_value(body, "bath.tim")?;
            Ok(BathConfig::Tim { kappa: positive("bath.tim.kappa", raw.kappa)? })
        }
        "discrete" => {
            let raw: RawDiscrete = from_value(body, "bath.discrete")?;
            BathSpec::new(raw.omega, raw.modes)
                .map(BathConfig::Discrete)
                .map_err(|e| invalid("bath.discrete", e.to_string()))
        }
        "spectral" => {
            let raw: RawSpectral = from_value(body, "bath.spectral")?;
            let omega = finite("bath.spectral.omega", raw.omega)?;
            let k = raw.k.unwrap_or(DEFAULT_MODES);
            let band = match raw.band {
                Some(b) => b,
                None => {
                    let kappa = 0.5 * raw.density.density(omega);
                    if !(kappa.is_finite() && kappa > 0.0) {
                        return Err(invalid("bath.spectral.band", "required when J(omega) is not positive"));
                    }
                    (omega - DEFAULT_HALF_BAND * kappa, omega + DEFAULT_HALF_BAND * kappa)
                }
            };
            let preset = SpectralPreset { omega, shape: raw.density, band, k };
            preset.validate().map_err(|e| invalid("bath.spectral", e.to_string()))?;
            Ok(BathConfig::Spectral(preset))
        }
        other => Err(ScenarioError::UnknownBathType(other.to_string())),
    }
}

/// Tolerance on `sinh² z = N` for an explicitly given squeezing.
const ANCILLA_TOL: f64 = 1e-9;

fn build_ancilla(system: &SystemInit, z: Option<f64>) -> Result<AncillaConfig, ScenarioError> {
    if system.mu().norm() > 0.0 || system.m().norm() > 0.0 {
        return Err(invalid("ancilla", "requires a thermal system state (mu = M = 0)"));
    }
    let n = system.n();
    let cfg = match z {
        None => AncillaConfig::for_occupation(n),
        Some(z) => AncillaConfig::new(z),
    }
    .map_err(|e| invalid("ancilla.z", e.to_string()))?;
    if (cfg.n() - n).abs() > ANCILLA_TOL * n.max(1.0) {
        return Err(invalid("ancilla.z", format!("sinh^2(z) = {} does not match N = {n}", cfg.n())));
    }
    Ok(cfg)
}
