//! Command-line orchestration: configuration, dispatch and report output.

mod commands;
mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::bilinear::BilinearError;
use crate::diophantine::DiophantineError;
use crate::picard::PicardError;
use crate::resonance::ResonanceError;
use crate::spectral::SpectralError;

pub use commands::run;
pub use report::{emit_plot_data, Cell, Metadata, Report, Table};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "MBKDV_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "mbkdv-out";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unknown table {0:?}")]
    UnknownTable(String),
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    /// `2` for configuration problems, `3` for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

impl From<ResonanceError> for CliError {
    fn from(e: ResonanceError) -> Self {
        match e {
            ResonanceError::PrecisionExhausted | ResonanceError::Surd(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<DiophantineError> for CliError {
    fn from(e: DiophantineError) -> Self {
        match e {
            DiophantineError::InvalidArgument(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<PicardError> for CliError {
    fn from(e: PicardError) -> Self {
        match e {
            PicardError::TimeOutOfRange(_) | PicardError::NotRationalResonance(_) => CliError::Config(e.to_string()),
            PicardError::Resonance(r) => r.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::BlowupDetected { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<BilinearError> for CliError {
    fn from(e: BilinearError) -> Self {
        match e {
            BilinearError::InsufficientWitnesses { .. } => CliError::Numerical(e.to_string()),
            BilinearError::Resonance(r) => r.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Roots,
    Diophantine,
    ResonanceScan,
    Simulate,
    Picard,
    BilinearScan,
    OmegaCount,
}

/// A complete, serializable description of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default = "default_out_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUT_DIR)
}

impl RunConfig {
    pub fn new(command: CommandName, params: impl Serialize) -> Self {
        let params = match serde_json::to_value(params) {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        };
        Self { command, params, output_dir: default_out_dir(), seed: 0 }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

pub mod defaults {
    pub const N_MAX_DIOPHANTINE: u64 = 10_000;
    pub const CF_TERMS: usize = 30;
    pub const SCAN_N_MIN: u64 = 1;
    pub const SCAN_N_MAX: u64 = 1000;
    pub const GRID_POINTS: usize = 256;
    pub const DT: f64 = 1e-4;
    pub const T_FINAL: f64 = 1.0;
    pub const LAMBDA: f64 = 1.0;
    pub const AMPLITUDE: f64 = 0.1;
    pub const MONITOR_STRIDE: usize = 100;
    pub const S: f64 = 0.0;
    pub const T_EVAL: f64 = 0.01;
    pub const B: f64 = 0.5;
    pub const S_MIN: f64 = 0.0;
    pub const S_MAX: f64 = 1.0;
    pub const S_STEP: f64 = 0.05;
    pub const M_MAX_EXP: u32 = 20;
    pub const WINDOW: f64 = 1.0;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum RootChoice {
    #[default]
    C1,
    C2,
    D1,
    D2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    #[default]
    Ifrk4,
    Etdrk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitialData {
    /// `A cos(x / lambda)` and `A cos(2 x / lambda)`.
    #[default]
    Cosine,
    /// Random low modes drawn from the seed.
    Random,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RootsArgs {
    /// Dispersion ratio, "p/q" for exact arithmetic or a decimal.
    #[arg(long)]
    pub alpha: String,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiophantineArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, value_enum, default_value_t = RootChoice::C1)]
    pub root: RootChoice,
    #[arg(long, default_value_t = defaults::N_MAX_DIOPHANTINE)]
    pub n_max: u64,
    #[arg(long, default_value_t = defaults::CF_TERMS)]
    pub terms: usize,
}

impl Default for DiophantineArgs {
    fn default() -> Self {
        Self { alpha: String::new(), root: RootChoice::C1, n_max: defaults::N_MAX_DIOPHANTINE, terms: defaults::CF_TERMS }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonanceScanArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = defaults::SCAN_N_MIN)]
    pub n_min: u64,
    #[arg(long, default_value_t = defaults::SCAN_N_MAX)]
    pub n_max: u64,
}

impl Default for ResonanceScanArgs {
    fn default() -> Self {
        Self { alpha: String::new(), n_min: defaults::SCAN_N_MIN, n_max: defaults::SCAN_N_MAX }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long)]
    pub alpha: String,
    /// Grid points (power of two).
    #[arg(long, default_value_t = defaults::GRID_POINTS)]
    pub n: usize,
    #[arg(long, default_value_t = defaults::DT)]
    pub dt: f64,
    /// Final time.
    #[arg(long, default_value_t = defaults::T_FINAL)]
    pub t: f64,
    #[arg(long, default_value_t = defaults::LAMBDA)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = SchemeChoice::Ifrk4)]
    pub scheme: SchemeChoice,
    #[arg(long, value_enum, default_value_t = InitialData::Cosine)]
    pub init: InitialData,
    #[arg(long, default_value_t = defaults::AMPLITUDE)]
    pub amplitude: f64,
    #[arg(long, default_value_t = defaults::MONITOR_STRIDE)]
    pub monitor_stride: usize,
    /// Evolve the mean-free fields with the induced linear coupling.
    #[arg(long)]
    pub reduce_means: bool,
    /// Skip the 2/3-rule truncation of the products.
    #[arg(long)]
    pub no_dealias: bool,
    /// Also write the final state as `checkpoint.json`.
    #[arg(long)]
    pub checkpoint: bool,
}

impl Default for SimulateArgs {
    fn default() -> Self {
        Self {
            alpha: String::new(),
            n: defaults::GRID_POINTS,
            dt: defaults::DT,
            t: defaults::T_FINAL,
            lambda: defaults::LAMBDA,
            scheme: SchemeChoice::Ifrk4,
            init: InitialData::Cosine,
            amplitude: defaults::AMPLITUDE,
            monitor_stride: defaults::MONITOR_STRIDE,
            reduce_means: false,
            no_dealias: false,
            checkpoint: false,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = defaults::S)]
    pub s: f64,
    /// Evaluation time in (0, 0.1].
    #[arg(long, default_value_t = defaults::T_EVAL)]
    pub t: f64,
    /// Explicit frequencies, comma separated; chosen automatically when empty.
    #[arg(long = "n", value_delimiter = ',')]
    pub n_list: Vec<u64>,
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Compare with numerical quadrature at this frequency.
    #[arg(long)]
    pub cross_check: Option<u64>,
}

impl Default for PicardArgs {
    fn default() -> Self {
        Self { alpha: String::new(), s: defaults::S, t: defaults::T_EVAL, n_list: Vec::new(), n_min: None, n_max: None, cross_check: None }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BilinearScanArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = defaults::B)]
    pub b: f64,
    #[arg(long, default_value_t = defaults::S_MIN)]
    pub s_min: f64,
    #[arg(long, default_value_t = defaults::S_MAX)]
    pub s_max: f64,
    #[arg(long, default_value_t = defaults::S_STEP)]
    pub s_step: f64,
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
}

impl Default for BilinearScanArgs {
    fn default() -> Self {
        Self {
            alpha: String::new(),
            b: defaults::B,
            s_min: defaults::S_MIN,
            s_max: defaults::S_MAX,
            s_step: defaults::S_STEP,
            n_min: None,
            n_max: None,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaCountArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = defaults::LAMBDA)]
    pub lambda: f64,
    /// Frequencies, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [16.0, 32.0, 64.0])]
    pub xi: Vec<f64>,
    /// Largest dyadic exponent `k` in `M = 2^k`.
    #[arg(long, default_value_t = defaults::M_MAX_EXP)]
    pub m_max_exp: u32,
    #[arg(long, default_value_t = defaults::WINDOW)]
    pub window_constant: f64,
}

impl Default for OmegaCountArgs {
    fn default() -> Self {
        Self {
            alpha: String::new(),
            lambda: defaults::LAMBDA,
            xi: vec![16.0, 32.0, 64.0],
            m_max_exp: defaults::M_MAX_EXP,
            window_constant: defaults::WINDOW,
        }
    }
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Resonance roots and the small-frequency cutoff.
    Roots(RootsArgs),
    /// Continued fraction and type index of a resonance root.
    Diophantine(DiophantineArgs),
    /// Nearest-integer resonance gaps over a range of frequencies.
    ResonanceScan(ResonanceScanArgs),
    /// Pseudospectral run with conservation monitors.
    Simulate(SimulateArgs),
    /// Picard iterate norms and their growth exponents.
    Picard(PicardArgs),
    /// Sharpness scan of the bilinear spike families.
    BilinearScan(BilinearScanArgs),
    /// Modulation measure near the resonance set in dyadic annuli.
    OmegaCount(OmegaCountArgs),
}

impl Command {
    fn into_config(self) -> RunConfig {
        match self {
            Command::Roots(a) => RunConfig::new(CommandName::Roots, a),
            Command::Diophantine(a) => RunConfig::new(CommandName::Diophantine, a),
            Command::ResonanceScan(a) => RunConfig::new(CommandName::ResonanceScan, a),
            Command::Simulate(a) => RunConfig::new(CommandName::Simulate, a),
            Command::Picard(a) => RunConfig::new(CommandName::Picard, a),
            Command::BilinearScan(a) => RunConfig::new(CommandName::BilinearScan, a),
            Command::OmegaCount(a) => RunConfig::new(CommandName::OmegaCount, a),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mbkdv", version, about = "Resonance, Diophantine and pseudospectral tools for the coupled KdV system")]
pub struct Cli {
    /// JSON run configuration used instead of a subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the environment and the config file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random initial data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

impl Cli {
    /// Resolves flags, config file and environment into one configuration.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut config = match (self.command, &self.config) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either a subcommand or --config, not both".into())),
            (Some(cmd), None) => cmd.into_config(),
            (None, Some(path)) => RunConfig::from_file(path)?,
            (None, None) => return Err(CliError::Config("a subcommand or --config is required".into())),
        };
        if let Some(dir) = self.out {
            config.output_dir = dir;
        } else if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
            config.output_dir = PathBuf::from(dir);
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        Ok(config)
    }
}
