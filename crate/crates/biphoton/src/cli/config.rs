//! Command-line and config-file parsing.
//!
//! Every option can come from three places, strongest first: a command-line
//! flag, a `key = value` line in the optional `--config` file, and (for the
//! seed only) the `BIPHOTON_SEED` environment variable. Unknown config-file
//! keys are rejected. Angles are radians unless `--degrees` (or
//! `degrees = true` in the file) is set, in which case every angular input
//! is converted once at merge time; reports always echo radians.

use clap::{Args, Parser, Subcommand};
use std::collections::HashMap;
use std::path::PathBuf;

use crate::elements::Arm;
use crate::models::{ModelKind, SourceSpec};
use crate::state::BellKind;
use crate::stats::RngSeed;

/// Seed used when neither flag, file, nor environment provides one.
pub const DEFAULT_SEED: u64 = 42;
/// Environment variable overriding the default seed.
pub const SEED_ENV_VAR: &str = "BIPHOTON_SEED";

/// A violation of the CLI contract; exits with code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Analytic and Monte Carlo runs of polarization-entangled photon-pair experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Exact joint distribution for one pair of polaroid settings
    Analytic(CommonArgs),
    /// Monte Carlo tally of one setting pair, with Wilson intervals and a
    /// comparison against the analytic joint
    Simulate(CommonArgs),
    /// Coincidence scan: station A fixed, station B over an angle grid
    Scan(CommonArgs),
    /// CHSH correlations at four analyzer angles
    Chsh(CommonArgs),
    /// Search the perfect-correlation orientation rule of each pair state
    /// and compare with the quoted listing
    VerifyRules(CommonArgs),
    /// Beam intensity behind a quarter-wave plate and rotating polaroid
    ExperimentA(CommonArgs),
    /// Coincidence matrix of circular-polarization detectors on both arms
    ExperimentB(CommonArgs),
    /// Model-equivalence matrix and divergence demonstration in one report
    Compare(CommonArgs),
}

impl CliCommand {
    pub fn name(&self) -> &'static str {
        match self {
            CliCommand::Analytic(_) => "analytic",
            CliCommand::Simulate(_) => "simulate",
            CliCommand::Scan(_) => "scan",
            CliCommand::Chsh(_) => "chsh",
            CliCommand::VerifyRules(_) => "verify-rules",
            CliCommand::ExperimentA(_) => "experiment-a",
            CliCommand::ExperimentB(_) => "experiment-b",
            CliCommand::Compare(_) => "compare",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            CliCommand::Analytic(a)
            | CliCommand::Simulate(a)
            | CliCommand::Scan(a)
            | CliCommand::Chsh(a)
            | CliCommand::VerifyRules(a)
            | CliCommand::ExperimentA(a)
            | CliCommand::ExperimentB(a)
            | CliCommand::Compare(a) => a,
        }
    }
}

/// The flag set shared by all subcommands; which fields are required
/// depends on the command and is validated after the config-file merge.
#[derive(Debug, Args, Default, Clone)]
pub struct CommonArgs {
    /// Measurement description: standard-qm | correlated-rule | local-circular
    #[arg(long)]
    pub model: Option<String>,
    /// Pair source: phi-plus | phi-minus | psi-plus | psi-minus | circular-pair
    #[arg(long)]
    pub source: Option<String>,
    /// Station A polaroid angle
    #[arg(long)]
    pub theta_a: Option<f64>,
    /// Station B polaroid angle
    #[arg(long)]
    pub theta_b: Option<f64>,
    /// CHSH analyzer angles as "a,a',b,b'"
    #[arg(long)]
    pub angles: Option<String>,
    /// Angle grid as "start:stop:points"
    #[arg(long)]
    pub grid: Option<String>,
    /// Polaroid grid resolution of the compare command
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Beam to scan: first (+z) | second (-z)
    #[arg(long)]
    pub arm: Option<String>,
    /// Quarter-wave-plate axis of the scanned beam
    #[arg(long)]
    pub plate_axis: Option<f64>,
    /// Station A quarter-wave-plate axis
    #[arg(long)]
    pub plate_axis_a: Option<f64>,
    /// Station B quarter-wave-plate axis
    #[arg(long)]
    pub plate_axis_b: Option<f64>,
    /// Number of Monte Carlo trials
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed (echoed in reports for reproduction)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Interpret all angle inputs as degrees
    #[arg(long)]
    pub degrees: bool,
    /// Output format: table | csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Config file of `key = value` lines (flags take precedence)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Analytic,
    Simulate,
    Scan,
    Chsh,
    VerifyRules,
    ExperimentA,
    ExperimentB,
    Compare,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Analytic => "analytic",
            CommandKind::Simulate => "simulate",
            CommandKind::Scan => "scan",
            CommandKind::Chsh => "chsh",
            CommandKind::VerifyRules => "verify-rules",
            CommandKind::ExperimentA => "experiment-a",
            CommandKind::ExperimentB => "experiment-b",
            CommandKind::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

/// Angle grid description (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

/// The merged, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub model: Option<ModelKind>,
    pub source: Option<SourceSpec>,
    pub theta_a: Option<f64>,
    pub theta_b: Option<f64>,
    pub chsh_angles: Option<[f64; 4]>,
    pub grid: Option<GridSpec>,
    pub grid_points: usize,
    pub arm: Arm,
    pub plate_axis_a: f64,
    pub plate_axis_b: f64,
    pub trials: Option<u64>,
    pub seed: RngSeed,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

const FILE_KEYS: &[&str] = &[
    "model",
    "source",
    "theta-a",
    "theta-b",
    "angles",
    "grid",
    "grid-points",
    "arm",
    "plate-axis",
    "plate-axis-a",
    "plate-axis-b",
    "trials",
    "seed",
    "degrees",
    "format",
    "output",
];

/// Parses a config file of `key = value` lines. Blank lines and lines
/// starting with `#` are ignored; unknown keys are rejected.
pub fn parse_config_file(text: &str) -> Result<HashMap<String, String>, UsageError> {
    let mut out = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!(
                "config line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key `{key}`", lineno + 1)));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(usage(format!("config line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(out)
}

pub fn parse_model(s: &str) -> Result<ModelKind, UsageError> {
    match s {
        "standard-qm" => Ok(ModelKind::StandardQm),
        "correlated-rule" => Ok(ModelKind::CorrelatedRule),
        "local-circular" => Ok(ModelKind::LocalCircular),
        other => Err(usage(format!(
            "unknown model `{other}` (expected standard-qm, correlated-rule or local-circular)"
        ))),
    }
}

pub fn parse_source(s: &str) -> Result<SourceSpec, UsageError> {
    match s {
        "phi-plus" => Ok(SourceSpec::Bell(BellKind::PhiPlus)),
        "phi-minus" => Ok(SourceSpec::Bell(BellKind::PhiMinus)),
        "psi-plus" => Ok(SourceSpec::Bell(BellKind::PsiPlus)),
        "psi-minus" => Ok(SourceSpec::Bell(BellKind::PsiMinus)),
        "circular-pair" => Ok(SourceSpec::CircularPair),
        other => Err(usage(format!(
            "unknown source `{other}` (expected phi-plus, phi-minus, psi-plus, psi-minus or circular-pair)"
        ))),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, UsageError> {
    match s {
        "table" => Ok(OutputFormat::Table),
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(usage(format!(
            "unknown format `{other}` (expected table, csv or json)"
        ))),
    }
}

fn parse_arm(s: &str) -> Result<Arm, UsageError> {
    match s {
        "first" => Ok(Arm::First),
        "second" => Ok(Arm::Second),
        other => Err(usage(format!("unknown arm `{other}` (expected first or second)"))),
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64, UsageError> {
    let v: f64 = s
        .parse()
        .map_err(|_| usage(format!("{key}: expected a number, got `{s}`")))?;
    if !v.is_finite() {
        return Err(usage(format!("{key}: value must be finite")));
    }
    Ok(v)
}

fn parse_u64(key: &str, s: &str) -> Result<u64, UsageError> {
    s.parse()
        .map_err(|_| usage(format!("{key}: expected a non-negative integer, got `{s}`")))
}

fn parse_bool(key: &str, s: &str) -> Result<bool, UsageError> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(usage(format!("{key}: expected true or false, got `{other}`"))),
    }
}

fn parse_angles_list(s: &str) -> Result<[f64; 4], UsageError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(usage(format!(
            "angles: expected four comma-separated values `a,a',b,b'`, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0; 4];
    for (i, p) in parts.iter().enumerate() {
        out[i] = parse_f64("angles", p)?;
    }
    Ok(out)
}

fn parse_grid_spec(s: &str) -> Result<GridSpec, UsageError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("grid: expected `start:stop:points`, got `{s}`")));
    }
    let start = parse_f64("grid start", parts[0])?;
    let stop = parse_f64("grid stop", parts[1])?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| usage("grid points: expected a positive integer"))?;
    if points == 0 {
        return Err(usage("grid points: must be at least 1"));
    }
    if points > 1 && stop <= start {
        return Err(usage("grid: stop must exceed start"));
    }
    Ok(GridSpec { start, stop, points })
}

/// Merges flags over file values over environment/defaults and validates
/// per-command requirements.
pub fn resolve(
    command: CommandKind,
    args: &CommonArgs,
    file: &HashMap<String, String>,
    env_seed: Option<u64>,
) -> Result<RunConfig, UsageError> {
    // generic flag > file > default lookup
    macro_rules! pick {
        ($flag:expr, $key:literal, $parse:expr) => {
            match (&$flag, file.get($key)) {
                (Some(v), _) => Some(v.clone()),
                (None, Some(raw)) => Some($parse(raw)?),
                (None, None) => None,
            }
        };
    }

    let model = match (&args.model, file.get("model")) {
        (Some(s), _) => Some(parse_model(s)?),
        (None, Some(s)) => Some(parse_model(s)?),
        (None, None) => None,
    };
    let source = match (&args.source, file.get("source")) {
        (Some(s), _) => Some(parse_source(s)?),
        (None, Some(s)) => Some(parse_source(s)?),
        (None, None) => None,
    };
    let format = match (&args.format, file.get("format")) {
        (Some(s), _) => parse_format(s)?,
        (None, Some(s)) => parse_format(s)?,
        (None, None) => OutputFormat::Table,
    };
    let arm = match (&args.arm, file.get("arm")) {
        (Some(s), _) => parse_arm(s)?,
        (None, Some(s)) => parse_arm(s)?,
        (None, None) => Arm::First,
    };
    let degrees = args.degrees
        || file
            .get("degrees")
            .map(|s| parse_bool("degrees", s))
            .transpose()?
            .unwrap_or(false);

    let theta_a = pick!(args.theta_a, "theta-a", |s| parse_f64("theta-a", s))
        .map(|v| check_finite("theta-a", v))
        .transpose()?;
    let theta_b = pick!(args.theta_b, "theta-b", |s| parse_f64("theta-b", s))
        .map(|v| check_finite("theta-b", v))
        .transpose()?;
    let plate_axis = pick!(args.plate_axis, "plate-axis", |s| parse_f64("plate-axis", s));
    let plate_axis_a = pick!(args.plate_axis_a, "plate-axis-a", |s| parse_f64(
        "plate-axis-a",
        s
    ));
    let plate_axis_b = pick!(args.plate_axis_b, "plate-axis-b", |s| parse_f64(
        "plate-axis-b",
        s
    ));
    let trials = pick!(args.trials, "trials", |s| parse_u64("trials", s));
    let grid_points = pick!(args.grid_points, "grid-points", |s| {
        parse_u64("grid-points", s).map(|v| v as usize)
    })
    .unwrap_or(24);

    let chsh_angles = match (&args.angles, file.get("angles")) {
        (Some(s), _) => Some(parse_angles_list(s)?),
        (None, Some(s)) => Some(parse_angles_list(s)?),
        (None, None) => None,
    };
    let grid = match (&args.grid, file.get("grid")) {
        (Some(s), _) => Some(parse_grid_spec(s)?),
        (None, Some(s)) => Some(parse_grid_spec(s)?),
        (None, None) => None,
    };

    let seed = args
        .seed
        .or_else(|| file.get("seed").and_then(|s| s.parse().ok()))
        .or(env_seed)
        .unwrap_or(DEFAULT_SEED);
    if let Some(raw) = file.get("seed") {
        if args.seed.is_none() && raw.parse::<u64>().is_err() {
            return Err(usage(format!("seed: expected a non-negative integer, got `{raw}`")));
        }
    }

    let output = args
        .output
        .clone()
        .or_else(|| file.get("output").map(PathBuf::from));

    // degree inputs are converted exactly once, here
    let conv = |v: f64| if degrees { v.to_radians() } else { v };
    let theta_a = theta_a.map(conv);
    let theta_b = theta_b.map(conv);
    let chsh_angles = chsh_angles.map(|a| a.map(conv));
    let grid = grid.map(|g| GridSpec {
        start: conv(g.start),
        stop: conv(g.stop),
        points: g.points,
    });
    let plate_axis = plate_axis.map(conv);
    let plate_axis_a = plate_axis_a.map(conv).or(plate_axis).unwrap_or(0.0);
    let plate_axis_b = plate_axis_b.map(conv).unwrap_or(plate_axis_a);

    let config = RunConfig {
        command,
        model,
        source,
        theta_a,
        theta_b,
        chsh_angles,
        grid,
        grid_points,
        arm,
        plate_axis_a,
        plate_axis_b,
        trials,
        seed: RngSeed(seed),
        format,
        output,
    };
    validate(&config)?;
    Ok(config)
}

fn check_finite(key: &str, v: f64) -> Result<f64, UsageError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{key}: value must be finite")))
    }
}

fn validate(config: &RunConfig) -> Result<(), UsageError> {
    let need_model_source = !matches!(
        config.command,
        CommandKind::VerifyRules | CommandKind::Compare
    );
    if need_model_source {
        if config.model.is_none() {
            return Err(usage(format!("{}: --model is required", config.command.name())));
        }
        if config.source.is_none() {
            return Err(usage(format!("{}: --source is required", config.command.name())));
        }
    }
    match config.command {
        CommandKind::Analytic | CommandKind::Simulate => {
            if config.theta_a.is_none() || config.theta_b.is_none() {
                return Err(usage(format!(
                    "{}: --theta-a and --theta-b are required",
                    config.command.name()
                )));
            }
            if config.command == CommandKind::Simulate {
                match config.trials {
                    None => return Err(usage("simulate: --trials is required")),
                    Some(0) => return Err(usage("simulate: --trials must be at least 1")),
                    Some(_) => {}
                }
            }
        }
        CommandKind::Scan => {
            if config.theta_a.is_none() {
                return Err(usage("scan: --theta-a is required"));
            }
            if config.grid.is_none() {
                return Err(usage("scan: --grid start:stop:points is required"));
            }
        }
        CommandKind::Chsh | CommandKind::ExperimentA | CommandKind::ExperimentB => {}
        CommandKind::VerifyRules | CommandKind::Compare => {}
    }
    if let Some(0) = config.trials {
        return Err(usage("--trials must be at least 1"));
    }
    if config.grid_points < 2 {
        return Err(usage("--grid-points must be at least 2"));
    }
    Ok(())
}
