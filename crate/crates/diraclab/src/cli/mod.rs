//! Experiment driver: named scenarios, layered configuration (scenario
//! defaults → config file → command-line overrides), reproducible runs, and
//! structured output (CSV/JSON ledgers, a JSON manifest, plain-text curve
//! exports).
//!
//! Everything here is deterministic: identical resolved configurations
//! produce bit-identical ledgers and manifests, with the wall-clock field of
//! the manifest as the single documented exception.

mod config;
mod output;
mod scenario;

pub use config::{parse_config, parse_config_with_overrides, RunConfig, CONFIG_KEYS};
pub use output::{write_csv, write_curve, write_json_records, write_manifest, CSV_HEADER};
pub use scenario::{run_scenario, CornerSummary, RunManifest};

use serde::Serialize;
use thiserror::Error;

use crate::closed_forms::ClosedFormError;
use crate::diagnostics::DiagnosticsError;
use crate::filament::FilamentError;
use crate::scattering::ScatterError;
use crate::solver::SolverError;

/// Process exit codes for the scenario driver.
pub mod exit_code {
    /// All checks passed.
    pub const OK: i32 = 0;
    /// Configuration rejected (parse or validation failure).
    pub const CONFIG: i32 = 1;
    /// A mandatory diagnostic check failed.
    pub const CHECK_FAILED: i32 = 2;
    /// The run left the finite range and stopped early.
    pub const BLOW_UP: i32 = 3;
    /// Output files could not be written.
    pub const IO: i32 = 4;
}

/// Errors from configuration parsing and scenario execution.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: expected 'key = value', got '{content}'")]
    MalformedLine { line: usize, content: String },
    #[error("duplicate key '{key}' on lines {first} and {second}")]
    DuplicateKey {
        key: String,
        first: usize,
        second: usize,
    },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { key: String, line: usize },
    #[error("unknown scenario '{name}' (known: critical-defocusing, critical-focusing, subcritical-conformal, subcritical-direct, gp, constant-cubic, filament-corner)")]
    UnknownScenario { name: String },
    #[error("no scenario selected (pass --scenario or a 'scenario = …' line)")]
    MissingScenario,
    #[error("{}: invalid value for '{key}': {reason}", source_label(.line))]
    InvalidValue {
        key: String,
        line: Option<usize>,
        reason: String,
    },
    #[error("incompatible configuration: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Filament(#[from] FilamentError),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

fn source_label(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}"),
        None => "command line".to_string(),
    }
}

impl CliError {
    /// Exit code this error maps to: 4 for I/O, 1 for everything else (all
    /// remaining variants are configuration or setup failures).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => exit_code::IO,
            _ => exit_code::CONFIG,
        }
    }
}

/// The named experiment scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Defocusing critical conformal run with the full energy ledger and
    /// a-priori bound checks.
    CriticalDefocusing,
    /// Focusing critical conformal run (ledger identities only; no
    /// monotonicity bounds hold).
    CriticalFocusing,
    /// Subcritical conformal run with dyadic scattering-tail checks.
    SubcriticalConformal,
    /// Subcritical perturbation in physical variables (short horizons; the
    /// chirped background is not periodic, so boundary contamination grows).
    SubcriticalDirect,
    /// Unit-background cubic flow with energy-drift and mass-envelope
    /// certificates.
    Gp,
    /// Cubic flow with no background: plain mass/energy conservation.
    ConstantCubic,
    /// Geometric pipeline: self-similar profiles, corner-tangent
    /// extrapolation, indicatrix invariant, curve export.
    FilamentCorner,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::CriticalDefocusing => "critical-defocusing",
            ScenarioKind::CriticalFocusing => "critical-focusing",
            ScenarioKind::SubcriticalConformal => "subcritical-conformal",
            ScenarioKind::SubcriticalDirect => "subcritical-direct",
            ScenarioKind::Gp => "gp",
            ScenarioKind::ConstantCubic => "constant-cubic",
            ScenarioKind::FilamentCorner => "filament-corner",
        }
    }

    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "critical-defocusing" => Ok(ScenarioKind::CriticalDefocusing),
            "critical-focusing" => Ok(ScenarioKind::CriticalFocusing),
            "subcritical-conformal" => Ok(ScenarioKind::SubcriticalConformal),
            "subcritical-direct" => Ok(ScenarioKind::SubcriticalDirect),
            "gp" => Ok(ScenarioKind::Gp),
            "constant-cubic" => Ok(ScenarioKind::ConstantCubic),
            "filament-corner" => Ok(ScenarioKind::FilamentCorner),
            other => Err(CliError::UnknownScenario { name: other.into() }),
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Named initial-data profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// Real Gaussian `amp·e^{-x²/2w²}` of width `w`.
    Gaussian,
    /// Single Fourier mode; the `width` slot carries the signed mode index
    /// (must be integer-valued).
    Mode,
    /// Identically zero perturbation.
    Zero,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::Mode => "mode",
            ProfileKind::Zero => "zero",
        }
    }
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Format of the per-record ledger file (the manifest is always JSON).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
