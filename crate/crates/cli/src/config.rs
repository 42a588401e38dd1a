//! Configuration resolution: command-line flags mirror a TOML config
//! file, with flags taking precedence. The fully resolved configuration
//! is echoed into the output's comment header so every file records how
//! it was produced.

use crate::CliError;
use rabi_aa::Engine;
use serde::Deserialize;

/// TOML file contents; every key optional, flags override.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "A")]
    pub a_over_omega: Option<f64>,
    pub delta: Option<f64>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub steps: Option<usize>,
    pub engines: Option<Vec<String>>,
    pub dt_omega: Option<f64>,
    pub quad_points: Option<usize>,
    pub periods: Option<u32>,
    pub initial: Option<String>,
    pub harmonic_n: Option<u32>,
    pub out: Option<String>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config '{path}': {e}")))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("bad config '{path}': {e}")))
    }
}

/// Engine list in canonical order, deduplicated.
pub fn parse_engines(names: &[String]) -> Result<Vec<Engine>, CliError> {
    let mut engines = Vec::new();
    for name in names {
        for part in name.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let engine: Engine = part
                .parse()
                .map_err(|e| CliError::Config(format!("{e}")))?;
            if !engines.contains(&engine) {
                engines.push(engine);
            }
        }
    }
    engines.sort();
    if engines.is_empty() {
        return Err(CliError::Config("engine list is empty".into()));
    }
    Ok(engines)
}

/// Resolved sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub a_over_omega: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub steps: usize,
    pub engines: Vec<Engine>,
    pub dt_omega: f64,
    pub quad_points: usize,
    pub jobs: usize,
    pub out: String,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(CliError::Config(format!("steps must be >= 2, got {}", self.steps)));
        }
        if self.delta_min.is_nan() || self.delta_max.is_nan() || self.delta_min >= self.delta_max {
            return Err(CliError::Config(format!(
                "need delta_min < delta_max, got [{}, {}]",
                self.delta_min, self.delta_max
            )));
        }
        if self.engines.is_empty() {
            return Err(CliError::Config("engine list is empty".into()));
        }
        Ok(())
    }

    pub fn echo(&self) -> String {
        let engines: Vec<String> = self.engines.iter().map(|e| e.to_string()).collect();
        format!(
            "config: cmd=sweep A={:?} delta_min={:?} delta_max={:?} steps={} engines={} dt_omega={:?} quad_points={} jobs={} out={}",
            self.a_over_omega,
            self.delta_min,
            self.delta_max,
            self.steps,
            engines.join("+"),
            self.dt_omega,
            self.quad_points,
            self.jobs,
            self.out
        )
    }
}

/// Resolved resonance-characterization configuration.
#[derive(Debug, Clone)]
pub struct ResonanceConfig {
    pub a_over_omega: f64,
    pub harmonic_n: u32,
    pub closed_form: bool,
    pub exact_numeric: bool,
    pub dt_omega: f64,
    pub out: String,
}

impl ResonanceConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=2).contains(&self.harmonic_n) {
            return Err(CliError::Config(format!(
                "harmonic_n must be 1 or 2, got {}",
                self.harmonic_n
            )));
        }
        if !self.closed_form && !self.exact_numeric {
            return Err(CliError::Config("no resonance engine selected".into()));
        }
        Ok(())
    }

    pub fn echo(&self) -> String {
        let mut engines = Vec::new();
        if self.closed_form {
            engines.push("closed_form");
        }
        if self.exact_numeric {
            engines.push("exact_numeric");
        }
        format!(
            "config: cmd=resonance A={:?} harmonic_n={} engines={} dt_omega={:?} out={}",
            self.a_over_omega,
            self.harmonic_n,
            engines.join("+"),
            self.dt_omega,
            self.out
        )
    }
}

/// Which state the Bloch trajectory starts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Instantaneous ground state of H(0).
    Instantaneous,
    /// Plus-branch cyclic state of the exact one-period propagator.
    Cyclic,
}

impl std::str::FromStr for InitialState {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "instantaneous" => Ok(InitialState::Instantaneous),
            "cyclic" => Ok(InitialState::Cyclic),
            other => Err(CliError::Config(format!(
                "unknown initial state '{other}' (expected instantaneous|cyclic)"
            ))),
        }
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Instantaneous => write!(f, "instantaneous"),
            InitialState::Cyclic => write!(f, "cyclic"),
        }
    }
}

/// Resolved Bloch-trajectory configuration.
#[derive(Debug, Clone)]
pub struct BlochConfig {
    pub delta_over_omega: f64,
    pub a_over_omega: f64,
    pub initial: InitialState,
    pub periods: u32,
    pub dt_omega: f64,
    pub out: String,
}

impl BlochConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.periods == 0 {
            return Err(CliError::Config("periods must be >= 1".into()));
        }
        Ok(())
    }

    pub fn echo(&self) -> String {
        format!(
            "config: cmd=bloch delta={:?} A={:?} initial={} periods={} dt_omega={:?} out={}",
            self.delta_over_omega,
            self.a_over_omega,
            self.initial,
            self.periods,
            self.dt_omega,
            self.out
        )
    }
}

/// Resolved slope/gap scan configuration.
#[derive(Debug, Clone)]
pub struct SlopesGapsConfig {
    pub a_min: f64,
    pub a_max: f64,
    pub steps: usize,
    /// Engine for the measured columns: `exact` or `pt3`.
    pub engine: Engine,
    pub dt_omega: f64,
    pub out: String,
}

impl SlopesGapsConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps < 1 {
            return Err(CliError::Config("steps must be >= 1".into()));
        }
        if !(self.a_min > 0.0 && self.a_min <= self.a_max) {
            return Err(CliError::Config(format!(
                "need 0 < a_min <= a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if !matches!(self.engine, Engine::Exact | Engine::Pt3) {
            return Err(CliError::Config(format!(
                "slopes-gaps supports engines exact|pt3, got {}",
                self.engine
            )));
        }
        Ok(())
    }

    pub fn echo(&self) -> String {
        format!(
            "config: cmd=slopes-gaps a_min={:?} a_max={:?} steps={} engine={} dt_omega={:?} out={}",
            self.a_min, self.a_max, self.steps, self.engine, self.dt_omega, self.out
        )
    }
}
