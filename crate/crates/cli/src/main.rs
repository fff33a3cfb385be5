//! `fcsent`: entanglement analysis of two-mode counting data.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 physics precondition
//! failed, 3 validation failure.

mod oracle_check;
mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fcsent::counting::{analyze_with, sample_counts, AnalysisOptions, CountDataset, DEFAULT_REPLICATES};
use fcsent::oracle::{synthesize_state, thermal_tail, JointNumberDistribution, SynthesisOptions, DEFAULT_TAIL_BOUND, MAX_CUTOFF};
use fcsent::witnesses::{region_grid, Axis, FixedParameter, GridSpec};
use fcsent::{Error, ThermalTwoModeState};

use report::{Inputs, ReportDocument};

#[derive(Debug, Parser)]
#[command(name = "fcsent", version, about = "Two-mode Gaussian entanglement from particle-number counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a recorded counting dataset
    Analyze(AnalyzeArgs),
    /// Sample a synthetic counting dataset from a thermal two-mode state
    Simulate(SimulateArgs),
    /// Print the two-body entanglement and separability thresholds
    Thresholds(ThresholdArgs),
    /// Evaluate the criterion on a parameter grid and write it as CSV
    Regions(RegionArgs),
    /// Cross-check closed forms against the Fock-space oracle
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Counting data, `shot_id,n1,n2`
    #[arg(long)]
    data: PathBuf,
    /// Detection efficiency
    #[arg(long, allow_hyphen_values = true)]
    eta: f64,
    /// Continue when single-mode statistics are not thermal
    #[arg(long)]
    override_thermal: bool,
    /// Bootstrap seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bootstrap replicates
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    bootstrap: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    n1: f64,
    #[arg(long, allow_hyphen_values = true)]
    n2: f64,
    /// |<a1 a2>|
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mpair: f64,
    /// |<a1 a2^dag>|
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mcoh: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    eta: f64,
    #[arg(long)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fock cutoff per mode; chosen from the tail mass when omitted
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long, allow_hyphen_values = true)]
    n1: f64,
    #[arg(long, allow_hyphen_values = true)]
    n2: f64,
}

#[derive(Debug, Args)]
struct RegionArgs {
    /// `n=<value>` for a (g2, theta) grid, `theta=<value>` for an (n, g2) grid
    #[arg(long, value_parser = parse_fixed, allow_hyphen_values = true)]
    fix: FixedParameter,
    /// `min:max` of g2
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    g2_range: Option<(f64, f64)>,
    /// `min:max` of theta (fixed n) or n (fixed theta)
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    other_range: Option<(f64, f64)>,
    /// Points per axis
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Populations per mode on the check grid
    #[arg(long, default_value_t = 3)]
    grid_resolution: usize,
    /// Fixed Fock cutoff; chosen per state when omitted
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// List every state
    #[arg(short, long)]
    verbose: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotBonaFide(_) | Error::Hypothesis(_) | Error::ThetaRange { .. } | Error::Degenerate(_) => 2,
            Error::Numerical(_) | Error::Discriminant { .. } => 3,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

fn parse_fixed(s: &str) -> Result<FixedParameter, String> {
    let (key, value) = s.split_once('=').ok_or("expected n=<value> or theta=<value>")?;
    let v: f64 = value.trim().parse().map_err(|e| format!("{value}: {e}"))?;
    match key.trim() {
        "n" => Ok(FixedParameter::Population(v)),
        "theta" => Ok(FixedParameter::Theta(v)),
        k => Err(format!("unknown parameter {k}; expected n or theta")),
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected min:max")?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn analyze(a: AnalyzeArgs) -> CmdResult {
    let data = CountDataset::load(&a.data).map_err(|e| Failure::usage(format!("{}: {e}", a.data.display())))?;
    let opts = AnalysisOptions {
        override_thermal: a.override_thermal,
        replicates: a.bootstrap,
        seed: a.seed,
        ..AnalysisOptions::new(a.eta)
    };
    let result = analyze_with(&data, &opts)?;
    let inputs = Inputs {
        data: a.data.display().to_string(),
        eta: a.eta,
        override_thermal: a.override_thermal,
        seed: a.seed,
        bootstrap: a.bootstrap,
        shots: data.len(),
    };
    let doc = ReportDocument::new(inputs, result);
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    write_file(&a.out, &doc.to_json().map_err(|e| Failure::usage(e.to_string()))?)?;
    let lam = doc.spectrum.map_or("n/a".to_string(), |s| format!("{:.6}", s.lambda_minus));
    let ln = doc.log_negativity.map_or("n/a".to_string(), |l| format!("{l:.6}"));
    println!("class: {} (lambda_minus {lam}, log negativity {ln})", doc.class);
    Ok(())
}

fn simulate(a: SimulateArgs) -> CmdResult {
    let state = ThermalTwoModeState::new(a.n1, a.n2, a.mpair, a.mcoh).map_err(|e| Failure::usage(e.to_string()))?;
    let cutoff = a.cutoff.unwrap_or_else(|| {
        (0..=MAX_CUTOFF)
            .find(|&n| thermal_tail(a.n1, a.n2, n) < DEFAULT_TAIL_BOUND)
            .unwrap_or(MAX_CUTOFF)
    });
    let rho = synthesize_state(&state, &SynthesisOptions::with_cutoff(cutoff))?;
    let dist = JointNumberDistribution::from_density(&rho);
    let data = sample_counts(&dist, a.shots, a.eta, a.seed)?;
    data.save(&a.out).map_err(|e| Failure::usage(format!("{}: {e}", a.out.display())))?;
    println!("cutoff {cutoff}, tail mass {:.3e}, {} shots written", rho.tail_mass(), data.len());
    Ok(())
}

fn thresholds(a: ThresholdArgs) -> CmdResult {
    use fcsent::witnesses::{g2_entanglement_threshold, g2_separability_threshold};
    let e = g2_entanglement_threshold(a.n1, a.n2).map_err(|e| Failure::usage(e.to_string()))?;
    let s = g2_separability_threshold(a.n1, a.n2).map_err(|e| Failure::usage(e.to_string()))?;
    println!("g2_E = {e}");
    println!("g2_S = {s}");
    println!(
        "two-mode squeezed vacuum with these populations: g2 = 2 + 1/sqrt(n1 n2) = {}",
        2.0 + 1.0 / (a.n1 * a.n2).sqrt()
    );
    Ok(())
}

fn regions(a: RegionArgs) -> CmdResult {
    let (x, y) = match a.fix {
        FixedParameter::Population(n) => (a.g2_range.unwrap_or((1.0, 2.0 + 1.0 / n)), a.other_range.unwrap_or((0.0, 1.0))),
        FixedParameter::Theta(_) => (a.other_range.unwrap_or((0.05, 2.0)), a.g2_range.unwrap_or((1.0, 4.0))),
    };
    let spec = GridSpec {
        fixed: a.fix,
        x: Axis::new(x.0, x.1, a.resolution),
        y: Axis::new(y.0, y.1, a.resolution),
    };
    let cells = region_grid(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    let mut csv = String::from("x,y,lambda_minus,log_negativity,class\n");
    for c in &cells {
        let _ = writeln!(csv, "{},{},{},{},{}", c.x, c.y, opt(c.lambda_minus), opt(c.log_negativity), c.class);
    }
    write_file(&a.out, &csv)?;
    println!("{} cells written", cells.len());
    Ok(())
}

fn oracle(a: OracleArgs) -> CmdResult {
    if a.grid_resolution == 0 {
        return Err(Failure::usage("grid resolution must be at least 1"));
    }
    if !(a.tolerance > 0.0) {
        return Err(Failure::usage("tolerance must be positive"));
    }
    let summary = oracle_check::run(a.grid_resolution, a.cutoff, a.tolerance);
    if a.verbose {
        print!("{}", summary.listing());
    }
    print!("{}", summary.table());
    let violations = summary.violations();
    if violations.is_empty() {
        return Ok(());
    }
    for v in &violations {
        eprintln!("violation: {v}");
    }
    Err(Failure {
        code: 3,
        message: format!("{} of {} states out of tolerance", violations.len(), summary.cases.len()),
    })
}

fn configure_threads() -> CmdResult {
    let Ok(v) = std::env::var("GE_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("GE_THREADS must be a non-negative integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Thresholds(a) => thresholds(a),
        Command::Regions(a) => regions(a),
        Command::OracleCheck(a) => oracle(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
