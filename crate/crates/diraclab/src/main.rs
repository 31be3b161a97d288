//! Scenario driver binary: resolve a configuration from defaults, an
//! optional config file, and command-line flags; run the scenario; print one
//! line per mandatory check; exit 0 only if everything passed.
//!
//! Exit codes: 0 all checks passed; 1 configuration error; 2 a mandatory
//! check failed; 3 the field blew up; 4 an output file could not be written.

use std::path::PathBuf;

use clap::Parser;

use diraclab::cli::{exit_code, parse_config_with_overrides, run_scenario};

/// Run a named equation or filament scenario and verify its invariants.
#[derive(Parser, Debug)]
#[command(name = "diraclab", version, about)]
struct Args {
    /// Scenario: critical-defocusing, critical-focusing,
    /// subcritical-conformal, subcritical-direct, gp, constant-cubic, or
    /// filament-corner.
    #[arg(long)]
    scenario: Option<String>,
    /// Config file of `key = value` lines (`#` comments); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid size (power of two).
    #[arg(long)]
    n: Option<String>,
    /// Half-width L of the periodic box [-L, L].
    #[arg(long)]
    half_width: Option<String>,
    /// Start of the time mesh.
    #[arg(long)]
    t_start: Option<String>,
    /// End of the time mesh.
    #[arg(long)]
    t_end: Option<String>,
    /// Number of time steps.
    #[arg(long)]
    steps: Option<String>,
    /// Nonlinearity exponent.
    #[arg(long)]
    alpha: Option<String>,
    /// Background amplitude modulus |a|.
    #[arg(long)]
    a_mod: Option<String>,
    /// Background amplitude phase arg(a), radians.
    #[arg(long)]
    a_arg: Option<String>,
    /// Nonlinearity sign: focusing or defocusing.
    #[arg(long)]
    sign: Option<String>,
    /// Initial perturbation: gaussian, mode, or zero.
    #[arg(long)]
    profile: Option<String>,
    /// Perturbation amplitude.
    #[arg(long)]
    amp: Option<String>,
    /// Gaussian width, or the signed mode index for the mode profile.
    #[arg(long)]
    width: Option<String>,
    /// Seed recorded in the manifest (consumed only by randomized profiles).
    #[arg(long)]
    seed: Option<String>,
    /// Output path stem; files get .csv/.json/.manifest.json/.curve.txt.
    #[arg(long)]
    out: Option<String>,
    /// Row format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Full-field snapshot budget (geometrically thinned).
    #[arg(long)]
    snapshots: Option<String>,
    /// Deliberately flip the nonlinear sign so the ledger checks trip — a
    /// built-in demonstration that the diagnostics catch a wrong equation.
    #[arg(long, default_value_t = false)]
    inject_sign_fault: bool,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // --help and --version land here too; those print to stdout and
            // exit cleanly, real parse errors are configuration errors.
            let code = if e.use_stderr() { exit_code::CONFIG } else { exit_code::OK };
            let _ = e.print();
            return code;
        }
    };

    let text = match &args.config {
        None => String::new(),
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("error: cannot read config file {}: {e}", path.display());
                return exit_code::IO;
            }
        },
    };

    let mut overrides: Vec<(String, String)> = Vec::new();
    macro_rules! flag {
        ($key:literal, $field:expr) => {
            if let Some(value) = &$field {
                overrides.push(($key.to_string(), value.clone()));
            }
        };
    }
    flag!("scenario", args.scenario);
    flag!("n", args.n);
    flag!("half_width", args.half_width);
    flag!("t_start", args.t_start);
    flag!("t_end", args.t_end);
    flag!("steps", args.steps);
    flag!("alpha", args.alpha);
    flag!("a_mod", args.a_mod);
    flag!("a_arg", args.a_arg);
    flag!("sign", args.sign);
    flag!("profile", args.profile);
    flag!("amp", args.amp);
    flag!("width", args.width);
    flag!("seed", args.seed);
    flag!("out", args.out);
    flag!("format", args.format);
    flag!("snapshots", args.snapshots);
    if args.inject_sign_fault {
        overrides.push(("inject_sign_fault".to_string(), "true".to_string()));
    }

    let cfg = match parse_config_with_overrides(&text, &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };

    let manifest = match run_scenario(&cfg) {
        Ok(manifest) => manifest,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };

    for check in &manifest.checks {
        let status = if check.passed { "pass" } else { "FAIL" };
        println!("[{status}] {}: {}", check.name, check.detail);
    }
    if let Some(b) = &manifest.blow_up {
        eprintln!(
            "field left the finite range at step {} (t = {:.6e}); run stopped early",
            b.step, b.time
        );
    }
    for path in &manifest.outputs {
        println!("wrote {path}");
    }

    if manifest.blow_up.is_some() {
        exit_code::BLOW_UP
    } else if !manifest.all_passed() {
        exit_code::CHECK_FAILED
    } else {
        exit_code::OK
    }
}
