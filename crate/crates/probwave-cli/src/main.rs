//! Command-line front end: verify | solve | compare | generate | fit |
//! report.
//!
//! Exit codes: 0 success, 1 domain/data errors (message on stderr, as JSON
//! when `--format json`), 2 usage errors. All results are written through
//! the deterministic report exporter, so equal seeds give byte-identical
//! outputs.

// `!(x > 0.0)` rejects NaN as well; `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand, ValueEnum};
use probwave::dataio::{
    build_distribution, export_report, infer_tick, parse_report_json, parse_trades, Report,
    ReportFormat, TradeRecord,
};
use probwave::eigensolve::{
    compare_spectra, solve_bessel_truncated, solve_spectrum_nonlocal, solve_spectrum_schrodinger,
    SolverConfig,
};
use probwave::fitkit::{fit_model, select_model, FitFamily, FitOptions};
use probwave::wavemodel::{Family, Grid, PotentialSpec, WaveModel};
use probwave::{acceptance, Error};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "probwave",
    version,
    about = "Probability-wave models for volume-price distributions: closed-form families, \
             shooting eigensolvers, and a distribution-fitting pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in verification suite (one line per criterion)
    Verify,
    /// Solve an eigenvalue spectrum
    Solve(SolveArgs),
    /// Compare the non-localized and Schrödinger spectra side by side
    Compare(CompareArgs),
    /// Generate synthetic trade data from a wave model
    Generate(GenerateArgs),
    /// Fit wave models to intraday trade data
    Fit(FitArgs),
    /// Convert a JSON report into another format
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed threaded to every stochastic component
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveFamily {
    Nonlocal,
    Schrodinger,
    BesselTruncated,
}

#[derive(Args)]
struct SolveArgs {
    /// Which eigenproblem to solve
    #[arg(long, value_enum)]
    family: SolveFamily,
    /// Reversal-force magnitude of the V-shaped potential
    #[arg(long, default_value_t = 1.0)]
    a_tt: f64,
    /// Scale constant of the non-localized equation
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Scale constant of the Schrödinger equation
    #[arg(long, default_value_t = 1.0)]
    beta_s: f64,
    /// Highest level index
    #[arg(long, default_value_t = 3)]
    nmax: usize,
    /// Truncation radius override (required meaning for bessel-truncated)
    #[arg(long)]
    ymax: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, default_value_t = 1.0)]
    a_tt: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    beta_s: f64,
    #[arg(long, default_value_t = 3)]
    nmax: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenFamily {
    Bessel,
    Kummer,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generating family
    #[arg(long, value_enum)]
    family: GenFamily,
    /// Interaction frequency (bessel)
    #[arg(long)]
    omega: Option<f64>,
    /// Reversal-force magnitude (kummer)
    #[arg(long)]
    a_tt: Option<f64>,
    /// Kummer order
    #[arg(long, default_value_t = 0)]
    order: u32,
    /// Equilibrium point
    #[arg(long, default_value_t = 100.0)]
    q0: f64,
    /// Price tick
    #[arg(long, default_value_t = 0.01)]
    tick: f64,
    /// Grid half-width around q0
    #[arg(long, default_value_t = 2.5)]
    span: f64,
    /// Number of draws
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitFamilyArg {
    Bessel,
    Kummer,
    Auto,
}

#[derive(Args)]
struct FitArgs {
    /// Trades CSV (`timestamp,price,volume`)
    #[arg(long)]
    input: PathBuf,
    /// Shares per lot
    #[arg(long, default_value_t = 100.0)]
    lot_size: f64,
    /// Time window `HH:MM..HH:MM` or epoch-ms range `START..END`
    #[arg(long)]
    window: Option<String>,
    /// Price tick, or `auto` to infer from the data
    #[arg(long, default_value = "auto")]
    tick: String,
    /// Candidate family
    #[arg(long, value_enum, default_value_t = FitFamilyArg::Auto)]
    family: FitFamilyArg,
    /// Highest Kummer order scanned
    #[arg(long, default_value_t = 3)]
    n_scan: u32,
    /// Multi-start count
    #[arg(long, default_value_t = 8)]
    starts: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report produced by another subcommand
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(), // 0 for --help/--version, 2 for usage errors
    };
    match cli.command {
        Command::Verify => run_verify(),
        Command::Solve(args) => dispatch(run_solve(&args), &args.output),
        Command::Compare(args) => dispatch(run_compare(&args), &args.output),
        Command::Generate(args) => dispatch(run_generate(&args), &args.output),
        Command::Fit(args) => dispatch(run_fit(&args), &args.output),
        Command::Report(args) => dispatch(run_report(&args), &args.output),
    }
}

fn run_verify() -> ExitCode {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("verify: {passed}/{} criteria passed", outcomes.len());
    if acceptance::all_passed(&outcomes) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Emits the report (or the error) and maps to the exit code contract.
fn dispatch(result: Result<Report, Error>, output: &OutputArgs) -> ExitCode {
    let written = result
        .and_then(|report| export_report(&report, output.format.into()))
        .and_then(|bytes| write_output(&bytes, output.out.as_deref()));
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => emit_error(&e, output),
    }
}

fn emit_error(e: &Error, output: &OutputArgs) -> ExitCode {
    if output.format == Format::Json {
        let report = Report::error(e.to_string());
        if let Ok(bytes) = export_report(&report, ReportFormat::Json) {
            let _ = std::io::stderr().write_all(&bytes);
        } else {
            eprintln!("error: {e}");
        }
    } else {
        eprintln!("error: {e}");
    }
    ExitCode::from(1)
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| Error::InvalidArgument(format!("cannot write stdout: {e}")))
        }
    }
}

fn run_solve(args: &SolveArgs) -> Result<Report, Error> {
    match args.family {
        SolveFamily::Nonlocal => {
            let potential = PotentialSpec::new(0.0, args.a_tt)?;
            let mut cfg = SolverConfig::for_nonlocal(&potential, args.beta, args.nmax);
            if let Some(ymax) = args.ymax {
                cfg = SolverConfig::new(ymax, cfg.steps, cfg.e_tol, cfg.n_max)?;
            }
            let sols = solve_spectrum_nonlocal(&potential, args.beta, &cfg)?;
            Ok(Report::from_spectrum(
                "nonlocal",
                args.a_tt,
                Some(args.beta),
                None,
                &cfg,
                &sols,
            ))
        }
        SolveFamily::Schrodinger => {
            let mut cfg = SolverConfig::for_schrodinger(args.a_tt, args.beta_s, args.nmax);
            if let Some(ymax) = args.ymax {
                cfg = SolverConfig::new(ymax, cfg.steps, cfg.e_tol, cfg.n_max)?;
            }
            let sols = solve_spectrum_schrodinger(args.a_tt, args.beta_s, &cfg)?;
            Ok(Report::from_spectrum(
                "schrodinger",
                args.a_tt,
                None,
                Some(args.beta_s),
                &cfg,
                &sols,
            ))
        }
        SolveFamily::BesselTruncated => {
            let y_max = args.ymax.unwrap_or(1.0);
            let cfg = SolverConfig::for_bessel_truncated(y_max);
            let hint = (0.5 / y_max, (args.nmax as f64 + 1.5) * PI / y_max);
            let mut omegas = solve_bessel_truncated(hint, y_max, &cfg)?;
            omegas.truncate(args.nmax + 1);
            Ok(Report::from_bessel_truncated(y_max, &omegas))
        }
    }
}

fn run_compare(args: &CompareArgs) -> Result<Report, Error> {
    let table = compare_spectra(args.a_tt, args.beta, args.beta_s, args.nmax)?;
    Ok(Report::from_comparison(
        args.a_tt, args.beta, args.beta_s, &table,
    ))
}

fn run_generate(args: &GenerateArgs) -> Result<Report, Error> {
    let model = match args.family {
        GenFamily::Bessel => {
            let omega = args.omega.ok_or_else(|| {
                Error::InvalidArgument("generate --family bessel requires --omega".into())
            })?;
            WaveModel::bessel(args.q0, omega, 1.0)?
        }
        GenFamily::Kummer => {
            let a_tt = args.a_tt.ok_or_else(|| {
                Error::InvalidArgument("generate --family kummer requires --a-tt".into())
            })?;
            WaveModel::kummer(args.q0, a_tt, args.order, 1.0)?
        }
    };
    if !(args.span > 0.0) || !(args.tick > 0.0) {
        return Err(Error::InvalidArgument(
            "span and tick must be positive".into(),
        ));
    }
    let half = (args.span / args.tick).round() as usize;
    if half == 0 {
        return Err(Error::InvalidArgument("span smaller than one tick".into()));
    }
    if half > 1_000_000 {
        return Err(Error::InvalidArgument(format!(
            "{} grid points from span {} and tick {}; tick too small",
            2 * half + 1,
            args.span,
            args.tick
        )));
    }
    let grid = Grid::uniform(args.q0 - half as f64 * args.tick, args.tick, 2 * half + 1)?;
    let dist = probwave::dataio::generate_synthetic(&model, &grid, args.n, args.output.seed)?;
    Report::from_synthetic(&model, &dist, args.n, args.output.seed)
}

fn read_file(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn run_fit(args: &FitArgs) -> Result<Report, Error> {
    let bytes = read_file(&args.input)?;
    let trades = parse_trades(bytes.as_slice(), args.lot_size)?;
    if trades.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let window = match &args.window {
        Some(spec) => parse_window(spec, &trades)?,
        None => {
            let lo = trades.iter().map(|t| t.timestamp_ms).min().unwrap();
            let hi = trades.iter().map(|t| t.timestamp_ms).max().unwrap();
            (lo, hi + 1)
        }
    };
    let in_window: Vec<f64> = trades
        .iter()
        .filter(|t| t.timestamp_ms >= window.0 && t.timestamp_ms < window.1)
        .map(|t| t.price)
        .collect();
    let tick = if args.tick == "auto" {
        infer_tick(&in_window)?
    } else {
        let t: f64 = args.tick.parse().map_err(|_| {
            Error::InvalidArgument(format!("--tick expects a number or `auto`, got `{}`", args.tick))
        })?;
        t
    };
    let dist = build_distribution(&trades, window, tick)?;
    let opts = FitOptions {
        n_scan_max: args.n_scan,
        starts: args.starts,
        seed: args.output.seed,
        ..FitOptions::default()
    };
    let ranked = match args.family {
        FitFamilyArg::Bessel => vec![fit_model(&dist, FitFamily::BesselJ0, &opts)?],
        FitFamilyArg::Kummer => {
            if args.n_scan == 0 {
                vec![fit_model(&dist, FitFamily::Kummer(0), &opts)?]
            } else {
                let kummer_only = FitOptions {
                    families: vec![Family::Kummer],
                    ..opts
                };
                select_model(&dist, &kummer_only)?
            }
        }
        FitFamilyArg::Auto => select_model(&dist, &opts)?,
    };
    Report::from_fit(&dist, &ranked, args.output.seed)
}

fn run_report(args: &ReportArgs) -> Result<Report, Error> {
    let bytes = read_file(&args.input)?;
    parse_report_json(&bytes)
}

/// `HH:MM..HH:MM` (resolved on the date of the first trade) or epoch-ms
/// `START..END`, half-open.
fn parse_window(spec: &str, trades: &[TradeRecord]) -> Result<(i64, i64), Error> {
    let (lo, hi) = spec.split_once("..").ok_or_else(|| {
        Error::InvalidArgument(format!("--window expects `START..END`, got `{spec}`"))
    })?;
    if let (Ok(a), Ok(b)) = (lo.trim().parse::<i64>(), hi.trim().parse::<i64>()) {
        if a >= b {
            return Err(Error::InvalidArgument(format!(
                "window start {a} not before end {b}"
            )));
        }
        return Ok((a, b));
    }
    let parse_hm = |s: &str| -> Result<(u32, u32), Error> {
        let (h, m) = s.trim().split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!("expected HH:MM, got `{s}`"))
        })?;
        let h: u32 = h
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad hour `{h}`")))?;
        let m: u32 = m
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad minute `{m}`")))?;
        if h > 23 || m > 59 {
            return Err(Error::InvalidArgument(format!("bad time `{s}`")));
        }
        Ok((h, m))
    };
    let (h1, m1) = parse_hm(lo)?;
    let (h2, m2) = parse_hm(hi)?;
    let first = trades.iter().map(|t| t.timestamp_ms).min().unwrap_or(0);
    let date = chrono::DateTime::from_timestamp_millis(first)
        .ok_or_else(|| Error::InvalidArgument("trade timestamp out of range".into()))?
        .date_naive();
    let to_ms = |h: u32, m: u32| {
        date.and_hms_opt(h, m, 0)
            .map(|dt| dt.and_utc().timestamp_millis())
            .ok_or_else(|| Error::InvalidArgument(format!("bad time {h}:{m}")))
    };
    let start = to_ms(h1, m1)?;
    let end = to_ms(h2, m2)?;
    if start >= end {
        return Err(Error::InvalidArgument(format!(
            "window `{spec}` is empty"
        )));
    }
    Ok((start, end))
}
