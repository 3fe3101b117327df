//! Command-line front end for the expanding-horizon channel library.
//!
//! Three subcommands: `sweep` evaluates the requested measures of the GHZ
//! and W states over a rate grid and emits CSV or JSON rows; `threshold`
//! bisects the rate where the W-state negativity vanishes and prints it
//! next to the two reference values; `verify` audits the truncated channel
//! at one rate (trace preservation, Choi positivity, route agreement,
//! purification norm).
//!
//! An optional `--config PATH` file supplies the same keys as the long
//! flags, one `key=value` per line, `#` comments allowed; flags given on
//! the command line take precedence, and unknown keys in the file are hard
//! errors rather than silently ignored.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 tolerance
//! violation reported by `verify`, 3 I/O failure.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use dshorizon::channel::{DEFAULT_TAIL_TOL, TRUNCATION_CAP};
use dshorizon::measures::Measure;
use dshorizon::states::StateKind;
use dshorizon::sweep::{
    emit_csv, emit_json, find_threshold, run_sweep, verify_channel, ClosedFormMode, OutputFormat,
    SweepConfig, TruncationChoice,
};
use dshorizon::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_TOLERANCE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dshorizon",
    version,
    about = "Entanglement measures of GHZ and W states behind an expanding horizon"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate measures over a rate grid and emit CSV or JSON rows
    Sweep(SweepArgs),
    /// Bisect the rate where the W-state negativity vanishes
    Threshold(ThresholdArgs),
    /// Audit the truncated channel at one rate
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// State to evaluate: ghz or w (repeatable; default: both)
    #[arg(long = "state", value_name = "ghz|w")]
    state: Vec<String>,

    /// Measure to evaluate (repeatable; default: all)
    #[arg(long = "measure", value_name = "fidelity|mi-ab|mi-abc|negativity|all")]
    measure: Vec<String>,

    /// Rate grid as MIN:MAX:STEP (default 0:2:0.01)
    #[arg(long, value_name = "MIN:MAX:STEP")]
    gamma: Option<String>,

    /// Fock cutoff: auto (from the tail tolerance) or an explicit N
    #[arg(long, value_name = "auto|N")]
    truncation: Option<String>,

    /// Squeezed-series tail mass the automatic cutoff may discard
    #[arg(long = "tail-tol", value_name = "X")]
    tail_tol: Option<f64>,

    /// Closed-form columns: numeric (none), paper (only rows that have
    /// one) or both
    #[arg(long = "closed-form", value_name = "numeric|paper|both")]
    closed_form: Option<String>,

    /// Output syntax
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,

    /// Write output here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// key=value config file supplying defaults for the flags above
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// State whose threshold to locate (only w has one)
    #[arg(long, value_name = "ghz|w", default_value = "w")]
    state: String,

    /// Tail tolerance for the per-probe automatic cutoff
    #[arg(long = "tail-tol", value_name = "X", default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Expansion rate to audit
    #[arg(long, value_name = "X")]
    gamma: f64,

    /// Fock cutoff: auto or an explicit N
    #[arg(long, value_name = "auto|N", default_value = "auto")]
    truncation: String,

    /// Tail tolerance for the automatic cutoff
    #[arg(long = "tail-tol", value_name = "X", default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
}

/// Values collected from a config file. List-valued keys accumulate
/// across lines and commas; scalar keys keep their last value.
#[derive(Default)]
struct FileConfig {
    states: Vec<String>,
    measures: Vec<String>,
    gamma: Option<String>,
    truncation: Option<String>,
    tail_tol: Option<String>,
    closed_form: Option<String>,
    format: Option<String>,
    out: Option<String>,
}

fn parse_config(path: &Path) -> Result<FileConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let spot = format!("{}:{}", path.display(), idx + 1);
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidArgument(format!(
                "{spot}: expected key=value, got '{line}'"
            )));
        };
        let (key, value) = (key.trim(), value.trim().to_string());
        let listed = |list: &mut Vec<String>, value: &str| {
            list.extend(value.split(',').map(|v| v.trim().to_string()));
        };
        match key {
            "state" => listed(&mut cfg.states, &value),
            "measure" => listed(&mut cfg.measures, &value),
            "gamma" => cfg.gamma = Some(value),
            "truncation" => cfg.truncation = Some(value),
            "tail-tol" => cfg.tail_tol = Some(value),
            "closed-form" => cfg.closed_form = Some(value),
            "format" => cfg.format = Some(value),
            "out" => cfg.out = Some(value),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "{spot}: unknown key '{other}'"
                )))
            }
        }
    }
    Ok(cfg)
}

fn parse_gamma_grid(s: &str) -> Result<(f64, f64, f64), Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "rate grid must be MIN:MAX:STEP, got '{s}'"
        )));
    }
    let number = |p: &str| {
        p.trim().parse::<f64>().map_err(|_| {
            Error::InvalidArgument(format!("bad number '{p}' in rate grid '{s}'"))
        })
    };
    Ok((number(parts[0])?, number(parts[1])?, number(parts[2])?))
}

fn parse_measures(tokens: &[String]) -> Result<Vec<Measure>, Error> {
    let mut out = Vec::new();
    for t in tokens {
        if t.eq_ignore_ascii_case("all") {
            out.extend(Measure::ALL);
        } else {
            out.push(t.parse()?);
        }
    }
    Ok(out)
}

/// Fold the config file under the command-line flags and produce the sweep
/// plan: flags win wherever both speak.
fn resolve_sweep(args: SweepArgs) -> Result<(SweepConfig, OutputFormat, Option<PathBuf>), Error> {
    let file = match &args.config {
        Some(path) => parse_config(path)?,
        None => FileConfig::default(),
    };

    let state_tokens = if args.state.is_empty() { file.states } else { args.state };
    let kinds: Vec<StateKind> = if state_tokens.is_empty() {
        StateKind::ALL.to_vec()
    } else {
        state_tokens
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?
    };

    let measure_tokens = if args.measure.is_empty() { file.measures } else { args.measure };
    let measures = if measure_tokens.is_empty() {
        Measure::ALL.to_vec()
    } else {
        parse_measures(&measure_tokens)?
    };

    let (gamma_min, gamma_max, gamma_step) = match args.gamma.or(file.gamma) {
        Some(s) => parse_gamma_grid(&s)?,
        None => (0.0, 2.0, 0.01),
    };
    let truncation = match args.truncation.or(file.truncation) {
        Some(s) => s.parse()?,
        None => TruncationChoice::Auto,
    };
    let tail_tol = match args.tail_tol {
        Some(x) => x,
        None => match file.tail_tol {
            Some(s) => s.parse().map_err(|_| {
                Error::InvalidArgument(format!("bad tail tolerance '{s}' in config file"))
            })?,
            None => DEFAULT_TAIL_TOL,
        },
    };
    let closed_form = match args.closed_form.or(file.closed_form) {
        Some(s) => s.parse()?,
        None => ClosedFormMode::Both,
    };
    let format = match args.format.or(file.format) {
        Some(s) => s.parse()?,
        None => OutputFormat::Csv,
    };
    let out = args.out.or(file.out.map(PathBuf::from));

    Ok((
        SweepConfig {
            kinds,
            measures,
            gamma_min,
            gamma_max,
            gamma_step,
            truncation,
            tail_tol,
            closed_form,
        },
        format,
        out,
    ))
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, Error> {
    let (cfg, format, out) = resolve_sweep(args)?;
    let rows = run_sweep(&cfg)?;
    if cfg.truncation == TruncationChoice::Auto {
        if let Some(row) = rows
            .iter()
            .find(|r| r.truncation == TRUNCATION_CAP && r.tail_bound > cfg.tail_tol)
        {
            eprintln!(
                "warning: cutoff capped at {TRUNCATION_CAP} from gamma = {}; tail bound \
                 {:.3e} exceeds the requested tolerance {:.1e}",
                row.gamma, row.tail_bound, cfg.tail_tol
            );
        }
    }
    let text = match format {
        OutputFormat::Csv => emit_csv(&rows),
        OutputFormat::Json => emit_json(&rows)?,
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_threshold(args: ThresholdArgs) -> Result<u8, Error> {
    let kind: StateKind = args.state.parse()?;
    let report = find_threshold(kind, args.tail_tol)?;
    println!("{report}");
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Error> {
    let truncation: TruncationChoice = args.truncation.parse()?;
    let report = verify_channel(args.gamma, truncation, args.tail_tol)?;
    println!("{report}");
    Ok(if report.passed() { 0 } else { EXIT_TOLERANCE })
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
