//! Configuration: scenario defaults, `key = value` config files, and
//! command-line overrides, resolved into a fully validated [`RunConfig`].

use std::collections::HashMap;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use super::{CliError, OutputFormat, ProfileKind, ScenarioKind};
use crate::closed_forms::{Sign, CRITICAL_DETECTION_TOL};
use crate::filament::MetricSign;
use crate::solver::{
    EquationSpec, Family, FieldState, MeshRule, SpatialGrid, TimeMesh,
};

/// Every key accepted in config files (and, with `-` for `_`, as a flag).
/// `mesh_rule`, `c0`, `metric`, `record_every`, and `inject_sign_fault` are
/// config-file keys without dedicated flags of their own (the fault switch
/// also has one, for test harnesses).
pub const CONFIG_KEYS: &[&str] = &[
    "scenario",
    "n",
    "half_width",
    "t_start",
    "t_end",
    "steps",
    "mesh_rule",
    "alpha",
    "a_mod",
    "a_arg",
    "sign",
    "profile",
    "amp",
    "width",
    "seed",
    "record_every",
    "snapshots",
    "out",
    "format",
    "c0",
    "metric",
    "inject_sign_fault",
];

/// A fully resolved run description: scenario defaults overlaid by config
/// file entries overlaid by command-line values, then validated as a whole.
/// Solver-facing scenarios are one-dimensional.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub n: usize,
    pub half_width: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub mesh_rule: MeshRule,
    pub alpha: f64,
    pub a_mod: f64,
    pub a_arg: f64,
    pub sign: Sign,
    pub profile: ProfileKind,
    pub amp: f64,
    /// Gaussian width for the `gaussian` profile; signed mode index for the
    /// `mode` profile (must be integer-valued); ignored for `zero`.
    pub width: f64,
    /// Recorded for provenance; consumed only by profiles that draw
    /// randomness (the named profiles here are deterministic).
    pub seed: u64,
    pub record_every: usize,
    pub snapshots: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
    /// Curvature amplitude for the filament scenario.
    pub c0: f64,
    /// Signature for the filament scenario.
    pub metric: MetricSign,
    /// Deliberately corrupt the nonlinear sign (fault-injection harness for
    /// the ledger checks).
    pub inject_sign_fault: bool,
}

impl RunConfig {
    /// The documented defaults table, per scenario.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let base = RunConfig {
            scenario,
            n: 2048,
            half_width: 16.0,
            t_start: 1.0,
            t_end: 1000.0,
            steps: 2000,
            mesh_rule: MeshRule::Logarithmic,
            alpha: 2.0,
            a_mod: 1.0,
            a_arg: 0.0,
            sign: Sign::Defocusing,
            profile: ProfileKind::Gaussian,
            amp: 0.2,
            width: 1.0,
            seed: 7,
            record_every: 4,
            snapshots: 64,
            out: PathBuf::from("run"),
            format: OutputFormat::Csv,
            c0: 0.5,
            metric: MetricSign::Euclidean,
            inject_sign_fault: false,
        };
        match scenario {
            ScenarioKind::CriticalDefocusing => base,
            ScenarioKind::CriticalFocusing => RunConfig {
                sign: Sign::Focusing,
                t_end: 100.0,
                steps: 1000,
                ..base
            },
            ScenarioKind::SubcriticalConformal => RunConfig {
                alpha: 1.0,
                t_end: 1024.0,
                // A wider box than the critical runs: the dyadic tail ratios
                // carry a resonant wobble on coarse frequency lattices that a
                // denser lattice smooths out.
                half_width: 24.0,
                amp: 0.05,
                ..base
            },
            ScenarioKind::SubcriticalDirect => RunConfig {
                alpha: 1.0,
                t_end: 4.0,
                steps: 400,
                record_every: 1,
                ..base
            },
            ScenarioKind::Gp => RunConfig {
                n: 512,
                t_start: 0.0,
                t_end: 10.0,
                steps: 10000,
                mesh_rule: MeshRule::Uniform,
                amp: 0.1,
                record_every: 20,
                ..base
            },
            ScenarioKind::ConstantCubic => RunConfig {
                n: 512,
                half_width: 8.0,
                t_start: 0.0,
                t_end: 1.0,
                steps: 8000,
                mesh_rule: MeshRule::Uniform,
                a_mod: 0.0,
                amp: 0.5,
                record_every: 16,
                ..base
            },
            ScenarioKind::FilamentCorner => RunConfig {
                n: 8192,
                half_width: 1.0,
                ..base
            },
        }
    }

    /// The equation family the scenario runs, if it runs one.
    pub fn family(&self) -> Option<Family> {
        match self.scenario {
            ScenarioKind::CriticalDefocusing | ScenarioKind::CriticalFocusing => {
                Some(Family::CriticalConformal)
            }
            ScenarioKind::SubcriticalConformal => Some(Family::ConformalPerturbation),
            ScenarioKind::SubcriticalDirect => Some(Family::DirectPerturbation),
            ScenarioKind::Gp => Some(Family::GrossPitaevskii),
            ScenarioKind::ConstantCubic => Some(Family::ConstantCubic),
            ScenarioKind::FilamentCorner => None,
        }
    }

    /// Background amplitude as a complex number.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.a_mod, self.a_arg)
    }

    /// The validated equation for PDE scenarios, `None` for the geometric
    /// one.
    pub fn equation(&self) -> Result<Option<EquationSpec>, CliError> {
        match self.family() {
            None => Ok(None),
            Some(family) => Ok(Some(EquationSpec::new(
                family,
                self.amplitude(),
                self.alpha,
                self.sign,
            )?)),
        }
    }

    pub fn grid(&self) -> Result<SpatialGrid, CliError> {
        Ok(SpatialGrid::new(self.n, self.half_width)?)
    }

    pub fn mesh(&self) -> Result<TimeMesh, CliError> {
        Ok(TimeMesh::new(
            self.t_start,
            self.t_end,
            self.steps,
            self.mesh_rule,
        )?)
    }

    /// Build the configured initial perturbation at the mesh start time.
    pub fn initial_state(&self) -> Result<FieldState, CliError> {
        let grid = self.grid()?;
        let state = match self.profile {
            ProfileKind::Gaussian => {
                FieldState::gaussian(grid, self.t_start, self.amp, self.width)?
            }
            ProfileKind::Mode => {
                FieldState::single_mode(grid, self.t_start, self.amp, self.width as i64)?
            }
            ProfileKind::Zero => FieldState::zeros(grid, self.t_start),
        };
        Ok(state)
    }
}

/// One parsed `key = value` assignment and where it came from (`None` for
/// the command line).
struct Assignment<'a> {
    key: &'a str,
    value: &'a str,
    line: Option<usize>,
}

fn is_known_key(key: &str) -> bool {
    CONFIG_KEYS.contains(&key)
}

fn invalid(key: &str, line: Option<usize>, reason: impl Into<String>) -> CliError {
    CliError::InvalidValue {
        key: key.to_string(),
        line,
        reason: reason.into(),
    }
}

fn parse_num<T: std::str::FromStr>(
    key: &str,
    value: &str,
    line: Option<usize>,
) -> Result<T, CliError> {
    value
        .parse::<T>()
        .map_err(|_| invalid(key, line, format!("cannot parse '{value}'")))
}

fn apply(cfg: &mut RunConfig, a: &Assignment<'_>) -> Result<(), CliError> {
    let (key, value, line) = (a.key, a.value, a.line);
    match key {
        "scenario" => cfg.scenario = ScenarioKind::parse(value)?,
        "n" => cfg.n = parse_num(key, value, line)?,
        "half_width" => cfg.half_width = parse_num(key, value, line)?,
        "t_start" => cfg.t_start = parse_num(key, value, line)?,
        "t_end" => cfg.t_end = parse_num(key, value, line)?,
        "steps" => cfg.steps = parse_num(key, value, line)?,
        "mesh_rule" => {
            cfg.mesh_rule = match value {
                "uniform" => MeshRule::Uniform,
                "logarithmic" | "log" => MeshRule::Logarithmic,
                _ => return Err(invalid(key, line, "expected uniform or logarithmic")),
            }
        }
        "alpha" => cfg.alpha = parse_num(key, value, line)?,
        "a_mod" => cfg.a_mod = parse_num(key, value, line)?,
        "a_arg" => cfg.a_arg = parse_num(key, value, line)?,
        "sign" => {
            cfg.sign = match value {
                "focusing" => Sign::Focusing,
                "defocusing" => Sign::Defocusing,
                _ => return Err(invalid(key, line, "expected focusing or defocusing")),
            }
        }
        "profile" => {
            cfg.profile = match value {
                "gaussian" => ProfileKind::Gaussian,
                "mode" => ProfileKind::Mode,
                "zero" => ProfileKind::Zero,
                _ => return Err(invalid(key, line, "expected gaussian, mode, or zero")),
            }
        }
        "amp" => cfg.amp = parse_num(key, value, line)?,
        "width" => cfg.width = parse_num(key, value, line)?,
        "seed" => cfg.seed = parse_num(key, value, line)?,
        "record_every" => cfg.record_every = parse_num(key, value, line)?,
        "snapshots" => cfg.snapshots = parse_num(key, value, line)?,
        "out" => cfg.out = PathBuf::from(value),
        "format" => {
            cfg.format = match value {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                _ => return Err(invalid(key, line, "expected csv or json")),
            }
        }
        "c0" => cfg.c0 = parse_num(key, value, line)?,
        "metric" => {
            cfg.metric = value
                .parse::<MetricSign>()
                .map_err(|e| invalid(key, line, e))?
        }
        "inject_sign_fault" => {
            cfg.inject_sign_fault = match value {
                "true" => true,
                "false" => false,
                _ => return Err(invalid(key, line, "expected true or false")),
            }
        }
        other => {
            return Err(CliError::UnknownKey {
                key: other.to_string(),
                line: line.unwrap_or(0),
            })
        }
    }
    Ok(())
}

/// Cross-field validation of a resolved config. Where a rule names a key the
/// error carries the line that set it (command line shown when it came from
/// a flag).
fn validate(cfg: &RunConfig, line_of: &HashMap<String, Option<usize>>) -> Result<(), CliError> {
    let at = |key: &str| line_of.get(key).copied().flatten();

    // Structural pieces reuse the library constructors so parse time catches
    // exactly what run time would.
    cfg.grid()?;
    cfg.mesh()?;
    if cfg.record_every == 0 {
        return Err(invalid("record_every", at("record_every"), "must be >= 1"));
    }
    if cfg.snapshots < 2 {
        return Err(invalid(
            "snapshots",
            at("snapshots"),
            "need at least the two endpoint snapshots",
        ));
    }
    match cfg.profile {
        ProfileKind::Gaussian => {
            if !(cfg.width > 0.0) || !cfg.width.is_finite() {
                return Err(invalid(
                    "width",
                    at("width"),
                    format!("gaussian width must be positive, got {}", cfg.width),
                ));
            }
        }
        ProfileKind::Mode => {
            if cfg.width.fract() != 0.0 || !cfg.width.is_finite() {
                return Err(invalid(
                    "width",
                    at("width"),
                    format!(
                        "the mode profile uses width as a signed integer mode index, got {}",
                        cfg.width
                    ),
                ));
            }
        }
        ProfileKind::Zero => {}
    }
    if !cfg.amp.is_finite() {
        return Err(invalid("amp", at("amp"), "must be finite"));
    }

    match cfg.scenario {
        ScenarioKind::CriticalDefocusing | ScenarioKind::CriticalFocusing => {
            if cfg.alpha != 2.0 {
                return Err(invalid(
                    "alpha",
                    at("alpha"),
                    "critical scenarios run the quartic equation: alpha = 2",
                ));
            }
            let want = if cfg.scenario == ScenarioKind::CriticalDefocusing {
                Sign::Defocusing
            } else {
                Sign::Focusing
            };
            if cfg.sign != want {
                return Err(invalid(
                    "sign",
                    at("sign"),
                    format!("the {} scenario fixes the sign", cfg.scenario),
                ));
            }
        }
        ScenarioKind::SubcriticalConformal | ScenarioKind::SubcriticalDirect => {
            if cfg.alpha >= 2.0 - CRITICAL_DETECTION_TOL {
                return Err(invalid(
                    "alpha",
                    at("alpha"),
                    format!(
                        "subcritical scenarios need alpha < 2 in one dimension, got {}",
                        cfg.alpha
                    ),
                ));
            }
        }
        ScenarioKind::Gp => {
            if cfg.a_mod != 1.0 || cfg.a_arg != 0.0 {
                return Err(invalid(
                    "a_mod",
                    at("a_mod").or(at("a_arg")),
                    "the unit-background scenario fixes a = 1",
                ));
            }
            if cfg.alpha != 2.0 {
                return Err(invalid("alpha", at("alpha"), "the unit-background flow is cubic: alpha = 2"));
            }
            if cfg.sign != Sign::Defocusing {
                return Err(invalid("sign", at("sign"), "the unit-background scenario is defocusing"));
            }
        }
        ScenarioKind::ConstantCubic => {
            if cfg.a_mod != 0.0 {
                return Err(invalid(
                    "a_mod",
                    at("a_mod"),
                    "the background-free scenario fixes a = 0",
                ));
            }
            if cfg.alpha != 2.0 {
                return Err(invalid("alpha", at("alpha"), "the background-free flow is cubic: alpha = 2"));
            }
        }
        ScenarioKind::FilamentCorner => {
            if !(cfg.c0 >= 0.0) || !cfg.c0.is_finite() {
                return Err(invalid(
                    "c0",
                    at("c0"),
                    format!("curvature amplitude must be finite and >= 0, got {}", cfg.c0),
                ));
            }
            if cfg.n < 8 {
                return Err(invalid("n", at("n"), "corner estimation needs n >= 8"));
            }
        }
    }

    // Equation-level invariants (exponent ranges, positive-time families…)
    // via the library constructor.
    if let Some(spec) = cfg.equation()? {
        if spec.requires_positive_time() && !(cfg.t_start > 0.0) {
            return Err(CliError::Incompatible(format!(
                "scenario {} needs t_start > 0, got {}",
                cfg.scenario, cfg.t_start
            )));
        }
    }
    Ok(())
}

/// Parse a `key = value` config text into a validated [`RunConfig`]. Lines
/// are 1-indexed; blank lines and `#` comment lines are skipped; the
/// `scenario` key selects the defaults everything else overlays.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_with_overrides(text, &[])
}

/// [`parse_config`] with a second layer of assignments that override file
/// values — the command-line layer. Override keys may repeat file keys
/// (that is their purpose); duplicates *within the file* are rejected with
/// both line numbers.
pub fn parse_config_with_overrides(
    text: &str,
    overrides: &[(String, String)],
) -> Result<RunConfig, CliError> {
    let mut file_entries: Vec<(String, String, usize)> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::MalformedLine {
                line: line_no,
                content: raw.trim().to_string(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::MalformedLine {
                line: line_no,
                content: raw.trim().to_string(),
            });
        }
        if !is_known_key(&key) {
            return Err(CliError::UnknownKey { key, line: line_no });
        }
        if let Some(&first) = seen.get(&key) {
            return Err(CliError::DuplicateKey {
                key,
                first,
                second: line_no,
            });
        }
        seen.insert(key.clone(), line_no);
        file_entries.push((key, value, line_no));
    }

    // The scenario selects the defaults table, so resolve it first; the
    // command line wins when both name one.
    let scenario_name = overrides
        .iter()
        .rev()
        .find(|(k, _)| k == "scenario")
        .map(|(_, v)| v.clone())
        .or_else(|| {
            file_entries
                .iter()
                .find(|(k, _, _)| k == "scenario")
                .map(|(_, v, _)| v.clone())
        })
        .ok_or(CliError::MissingScenario)?;
    let scenario = ScenarioKind::parse(&scenario_name)?;

    let mut cfg = RunConfig::defaults(scenario);
    let mut line_of: HashMap<String, Option<usize>> = HashMap::new();
    for (key, value, line_no) in &file_entries {
        apply(
            &mut cfg,
            &Assignment {
                key,
                value,
                line: Some(*line_no),
            },
        )?;
        line_of.insert(key.clone(), Some(*line_no));
    }
    for (key, value) in overrides {
        if !is_known_key(key) {
            return Err(CliError::UnknownKey {
                key: key.clone(),
                line: 0,
            });
        }
        apply(
            &mut cfg,
            &Assignment {
                key,
                value,
                line: None,
            },
        )?;
        line_of.insert(key.clone(), None);
    }
    cfg.scenario = scenario;

    validate(&cfg, &line_of)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overrides(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn empty_text_with_scenario_flag_applies_defaults() {
        for name in [
            "critical-defocusing",
            "critical-focusing",
            "subcritical-conformal",
            "subcritical-direct",
            "gp",
            "constant-cubic",
            "filament-corner",
        ] {
            let cfg = parse_config_with_overrides("", &overrides(&[("scenario", name)]))
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.scenario.name(), name);
        }
    }

    #[test]
    fn quartic_exponent_is_rejected_for_subcritical_scenarios() {
        let err = parse_config("scenario = subcritical-conformal\nalpha = 2").unwrap_err();
        match err {
            CliError::InvalidValue { key, line, .. } => {
                assert_eq!(key, "alpha");
                assert_eq!(line, Some(2));
            }
            other => panic!("expected InvalidValue, got {other}"),
        }
    }

    #[test]
    fn duplicate_keys_report_both_lines() {
        let err = parse_config("scenario = gp\nn = 512\nn = 1024").unwrap_err();
        match err {
            CliError::DuplicateKey { key, first, second } => {
                assert_eq!(key, "n");
                assert_eq!((first, second), (2, 3));
            }
            other => panic!("expected DuplicateKey, got {other}"),
        }
    }

    #[test]
    fn malformed_and_unknown_inputs_are_rejected_with_lines() {
        assert!(matches!(
            parse_config("scenario = gp\nwhat is this"),
            Err(CliError::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("scenario = gp\nfrobnicate = 3"),
            Err(CliError::UnknownKey { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("scenario = warp-drive"),
            Err(CliError::UnknownScenario { .. })
        ));
        assert!(matches!(parse_config(""), Err(CliError::MissingScenario)));
    }

    #[test]
    fn command_line_overrides_file_values() {
        let cfg = parse_config_with_overrides(
            "scenario = gp\nn = 256\n# comment\n\nsteps = 100",
            &overrides(&[("n", "1024")]),
        )
        .unwrap();
        assert_eq!(cfg.n, 1024);
        assert_eq!(cfg.steps, 100);
    }

    #[test]
    fn scenario_guardrails_hold() {
        assert!(parse_config("scenario = gp\na_mod = 2").is_err());
        assert!(parse_config("scenario = constant-cubic\na_mod = 1").is_err());
        assert!(parse_config("scenario = critical-defocusing\nsign = focusing").is_err());
        assert!(parse_config("scenario = critical-defocusing\nalpha = 1").is_err());
        assert!(parse_config("scenario = filament-corner\nc0 = -1").is_err());
        assert!(
            parse_config("scenario = subcritical-direct\nt_start = 0\nmesh_rule = uniform")
                .is_err()
        );
    }

    #[test]
    fn mode_profile_needs_an_integer_index() {
        assert!(parse_config("scenario = gp\nprofile = mode\nwidth = 2.5").is_err());
        let cfg = parse_config("scenario = gp\nprofile = mode\nwidth = 3").unwrap();
        assert_eq!(cfg.profile, ProfileKind::Mode);
        let state = cfg.initial_state().unwrap();
        assert!(state.l2_norm_sq() > 0.0);
    }

    #[test]
    fn solver_preconditions_surface_at_parse_time() {
        // Non-power-of-two grid.
        assert!(parse_config("scenario = gp\nn = 1000").is_err());
        // Logarithmic mesh from zero.
        assert!(parse_config("scenario = gp\nmesh_rule = log").is_err());
    }
}
