//! Command-line driver: evolution, pulse synthesis, feasibility mapping,
//! trajectory export, teleportation demo and the verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use isingpulse::evolution::{classify_form, compose, propagator, UnitaryBell};
use isingpulse::gates::{teleport, MeasurementBasis};
use isingpulse::geometry::{sample_trajectory, Projection};
use isingpulse::math::C64;
use isingpulse::model::{Axis, PhysicalParams, Sign};
use isingpulse::state::{Basis, TwoQubitState};
use isingpulse::synthesis::{
    exchange_two_pulse, feasibility_csv, feasibility_map, general_antidiag, general_diagonal,
    loop_one_pulse, search_loop_selectors, ExchangeSelectors, LoopSelectors, SectorInts,
};
use isingpulse::verify;
use serde::Deserialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "isingpulse", version, about = "Driven two-qubit Ising control toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a propagator (or a pulse sequence) and write it as JSON,
    /// optionally with a chart-trajectory CSV.
    Evolve(EvolveArgs),
    /// Synthesize a one-pulse evolution loop from integer selectors.
    SynthLoop(SynthLoopArgs),
    /// Synthesize a two-pulse Bell-pair exchange operation.
    SynthExchange(SynthExchangeArgs),
    /// Synthesize a generalized diagonal or antidiagonal form.
    SynthForm(SynthFormArgs),
    /// Map the ξ-equation feasibility region to CSV.
    Feasibility(FeasibilityArgs),
    /// Export the chart trajectory of a pulse sequence to CSV.
    Trajectory(TrajectoryArgs),
    /// Run the Ising-driven teleportation protocol over all branches.
    Teleport(TeleportArgs),
    /// Run the verification suites and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EvolveArgs {
    /// JSON file: {"J":[..],"B1":..,"B2":..,"axis":..} or {"pulses":[{"params":..,"t":..},..]}
    #[arg(long)]
    params: PathBuf,
    /// Duration (required when the file holds a single parameter set).
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the chart trajectory of the evolution to this CSV path.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = ProjectionArg::Magnitude)]
    projection: ProjectionArg,
    /// Initial state for the trajectory, e.g. bell:00 or comp:01.
    #[arg(long, default_value = "bell:00")]
    initial: String,
    /// Fold trajectory samples into the canonical cube.
    #[arg(long, default_value_t = true)]
    folded: bool,
}

#[derive(Args)]
struct SynthLoopArgs {
    /// Couplings J1,J2,J3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    j: Vec<f64>,
    #[arg(long)]
    axis: u8,
    #[arg(long, allow_hyphen_values = true)]
    m_minus: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    n_minus: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    m_plus: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    n_plus: Option<i64>,
    /// Search selectors up to this bound instead of giving them explicitly.
    #[arg(long)]
    search: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthExchangeArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    j: Vec<f64>,
    /// Couplings of the second pulse (defaults to --j).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    j2: Option<Vec<f64>>,
    #[arg(long)]
    axis: u8,
    /// Sector (1 or 2) that becomes antidiagonal.
    #[arg(long, default_value_t = 1)]
    antidiag_sector: u8,
    #[arg(long, allow_hyphen_values = true)]
    n_anti: i64,
    #[arg(long, allow_hyphen_values = true)]
    n_prime_anti: i64,
    #[arg(long, allow_hyphen_values = true)]
    m_diag: i64,
    #[arg(long, allow_hyphen_values = true)]
    n_diag: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormKind {
    Diagonal,
    Antidiag,
}

#[derive(Args)]
struct SynthFormArgs {
    #[arg(long, value_enum)]
    kind: FormKind,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    j: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    j2: Option<Vec<f64>>,
    #[arg(long)]
    axis: u8,
    #[arg(long, default_value_t = 1)]
    antidiag_sector: u8,
    #[arg(long)]
    t: f64,
    /// Second pulse duration (antidiag kind).
    #[arg(long)]
    t2: Option<f64>,
    /// Sector winding integers (diagonal kind).
    #[arg(long, allow_hyphen_values = true)]
    n_minus: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    n_plus: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

#[derive(Args)]
struct FeasibilityArgs {
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    a_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    a_max: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    b_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    b_max: f64,
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
    branch: BranchArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProjectionArg {
    Magnitude,
    Real,
}

impl From<ProjectionArg> for Projection {
    fn from(p: ProjectionArg) -> Self {
        match p {
            ProjectionArg::Magnitude => Projection::Magnitude,
            ProjectionArg::Real => Projection::Real,
        }
    }
}

#[derive(Args)]
struct TrajectoryArgs {
    /// JSON pulse-sequence file (or single params with --t).
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value = "bell:00")]
    initial: String,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = ProjectionArg::Magnitude)]
    projection: ProjectionArg,
    #[arg(long, default_value_t = true)]
    folded: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Computational,
    Bell,
}

#[derive(Args)]
struct TeleportArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    a_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a_im: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b_im: f64,
    #[arg(long, value_enum, default_value_t = BasisArg::Computational)]
    basis: BasisArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 12345)]
    seed: u64,
    /// Tolerance override applied to every suite.
    #[arg(long)]
    tol: Option<f64>,
    /// Which suite to run (default all).
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Verification(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Verification(m) => write!(f, "verification failure: {m}"),
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Deserialize)]
struct PulseEntry {
    params: PhysicalParams,
    t: f64,
}

#[derive(Deserialize)]
struct PulseSequenceFile {
    pulses: Vec<PulseEntry>,
}

fn load_pulses(path: &PathBuf, t: Option<f64>) -> Result<Vec<(PhysicalParams, f64)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(input_err)?;
    if let Ok(seq) = serde_json::from_str::<PulseSequenceFile>(&text) {
        if seq.pulses.is_empty() {
            return Err(CliError::Input("pulse sequence is empty".into()));
        }
        for p in &seq.pulses {
            p.params.validate().map_err(input_err)?;
            if !(p.t >= 0.0) {
                return Err(CliError::Input(format!("pulse duration {} is negative", p.t)));
            }
        }
        return Ok(seq.pulses.into_iter().map(|e| (e.params, e.t)).collect());
    }
    let params: PhysicalParams = serde_json::from_str(&text).map_err(input_err)?;
    params.validate().map_err(input_err)?;
    let t = t.ok_or_else(|| {
        CliError::Input("--t is required when the file holds a single parameter set".into())
    })?;
    if !(t >= 0.0) {
        return Err(CliError::Input(format!("duration {t} is negative")));
    }
    Ok(vec![(params, t)])
}

fn parse_initial(spec: &str) -> Result<TwoQubitState, CliError> {
    let (kind, labels) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Input(format!("bad initial state '{spec}', want e.g. bell:00")))?;
    let bytes = labels.as_bytes();
    if bytes.len() != 2 || !bytes.iter().all(|c| *c == b'0' || *c == b'1') {
        return Err(CliError::Input(format!("bad state labels '{labels}'")));
    }
    let (a, b) = (bytes[0] - b'0', bytes[1] - b'0');
    match kind {
        "bell" => Ok(TwoQubitState::bell(a, b)),
        "comp" | "computational" => Ok(TwoQubitState::computational(a, b)),
        _ => Err(CliError::Input(format!("unknown basis '{kind}'"))),
    }
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(input_err),
        None => {
            std::io::stdout().write_all(content.as_bytes()).map_err(input_err)?;
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn parse_axis(h: u8) -> Result<Axis, CliError> {
    Axis::from_index(h).map_err(input_err)
}

fn parse_triple(v: &[f64]) -> Result<[f64; 3], CliError> {
    if v.len() != 3 {
        return Err(CliError::Input("expected three coupling values".into()));
    }
    Ok([v[0], v[1], v[2]])
}

fn cmd_evolve(args: &EvolveArgs) -> Result<(), CliError> {
    let pulses = load_pulses(&args.params, args.t)?;
    let mut u = UnitaryBell::identity(Basis::Bell);
    for (params, t) in &pulses {
        u = compose(&propagator(params, *t), &u).map_err(input_err)?;
    }
    let form = classify_form(&u, 1e-8);
    let json = serde_json::json!({
        "unitary": u.to_json(),
        "form": form,
        "unitarity_defect": u.unitarity_defect(),
    });
    write_out(&args.out, &serde_json::to_string_pretty(&json).map_err(input_err)?)?;

    if let Some(tr_path) = &args.trajectory {
        let initial = parse_initial(&args.initial)?;
        let tr = sample_trajectory(
            &pulses,
            &initial,
            args.steps,
            args.projection.into(),
            args.folded,
        )
        .map_err(input_err)?;
        std::fs::write(tr_path, tr.to_csv()).map_err(input_err)?;
    }
    Ok(())
}

fn cmd_synth_loop(args: &SynthLoopArgs) -> Result<(), CliError> {
    let j = parse_triple(&args.j)?;
    let axis = parse_axis(args.axis)?;
    if j[axis.pos()] == 0.0 {
        return Err(CliError::Input("J along the pulse axis must be nonzero".into()));
    }
    let specs = if let Some(n_max) = args.search {
        let found = search_loop_selectors(j, axis, n_max);
        if found.is_empty() {
            return Err(CliError::Input(format!("no loop selectors found up to |n| <= {n_max}")));
        }
        found
    } else {
        let sel = LoopSelectors {
            minus: SectorInts {
                m: args.m_minus.ok_or_else(|| CliError::Input("--m-minus required".into()))?,
                n: args.n_minus.ok_or_else(|| CliError::Input("--n-minus required".into()))?,
            },
            plus: SectorInts {
                m: args.m_plus.ok_or_else(|| CliError::Input("--m-plus required".into()))?,
                n: args.n_plus.ok_or_else(|| CliError::Input("--n-plus required".into()))?,
            },
        };
        loop_one_pulse(j, axis, sel).map_err(input_err)?
    };
    let json = serde_json::json!({
        "specs": specs.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
    });
    write_out(&args.out, &serde_json::to_string_pretty(&json).map_err(input_err)?)
}

fn cmd_synth_exchange(args: &SynthExchangeArgs) -> Result<(), CliError> {
    let j = parse_triple(&args.j)?;
    let j2 = match &args.j2 {
        Some(v) => parse_triple(v)?,
        None => j,
    };
    let axis = parse_axis(args.axis)?;
    let sel = ExchangeSelectors {
        n_anti: args.n_anti,
        n_prime_anti: args.n_prime_anti,
        m_diag: args.m_diag,
        n_diag: args.n_diag,
    };
    let specs =
        exchange_two_pulse(j, j2, axis, args.antidiag_sector, sel).map_err(input_err)?;
    let json = serde_json::json!({
        "specs": specs.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
    });
    write_out(&args.out, &serde_json::to_string_pretty(&json).map_err(input_err)?)
}

fn cmd_synth_form(args: &SynthFormArgs) -> Result<(), CliError> {
    let j = parse_triple(&args.j)?;
    let axis = parse_axis(args.axis)?;
    let json = match args.kind {
        FormKind::Diagonal => {
            let n_minus =
                args.n_minus.ok_or_else(|| CliError::Input("--n-minus required".into()))?;
            let n_plus = args.n_plus.ok_or_else(|| CliError::Input("--n-plus required".into()))?;
            let spec = general_diagonal(j, axis, args.t, n_minus, n_plus).map_err(input_err)?;
            serde_json::json!({ "specs": [spec.to_json()] })
        }
        FormKind::Antidiag => {
            let j2 = match &args.j2 {
                Some(v) => parse_triple(v)?,
                None => j,
            };
            let t2 = args.t2.ok_or_else(|| CliError::Input("--t2 required".into()))?;
            let spec = general_antidiag(j, j2, axis, args.antidiag_sector, args.t, t2)
                .map_err(input_err)?;
            serde_json::json!({ "specs": [spec.to_json()] })
        }
    };
    write_out(&args.out, &serde_json::to_string_pretty(&json).map_err(input_err)?)
}

fn cmd_feasibility(args: &FeasibilityArgs) -> Result<(), CliError> {
    if args.resolution == 0 {
        return Err(CliError::Input("resolution must be positive".into()));
    }
    let branch = match args.branch {
        BranchArg::Plus => Sign::Plus,
        BranchArg::Minus => Sign::Minus,
    };
    let cells = feasibility_map(
        (args.a_min, args.a_max),
        (args.b_min, args.b_max),
        args.resolution,
        branch,
    );
    write_out(&args.out, &feasibility_csv(&cells))
}

fn cmd_trajectory(args: &TrajectoryArgs) -> Result<(), CliError> {
    let pulses = load_pulses(&args.params, args.t)?;
    let initial = parse_initial(&args.initial)?;
    if args.steps < 2 {
        return Err(CliError::Input("--steps must be at least 2".into()));
    }
    let tr = sample_trajectory(&pulses, &initial, args.steps, args.projection.into(), args.folded)
        .map_err(input_err)?;
    write_out(&args.out, &tr.to_csv())
}

fn cmd_teleport(args: &TeleportArgs) -> Result<(), CliError> {
    let a = C64::new(args.a_re, args.a_im);
    let b = C64::new(args.b_re, args.b_im);
    let basis = match args.basis {
        BasisArg::Computational => MeasurementBasis::Computational,
        BasisArg::Bell => MeasurementBasis::Bell,
    };
    let outcomes = teleport(a, b, basis).map_err(input_err)?;
    let worst = outcomes.iter().map(|o| 1.0 - o.fidelity).fold(0.0, f64::max);
    let json = serde_json::json!({
        "outcomes": outcomes,
        "worst_infidelity": worst,
    });
    write_out(&args.out, &serde_json::to_string_pretty(&json).map_err(input_err)?)?;
    if worst > 1e-10 {
        return Err(CliError::Verification(format!("worst infidelity {worst:.3e}")));
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let reports = match args.suite.as_str() {
        "all" => verify::run_all(args.seed, args.tol),
        "oracle" => vec![verify::oracle_equivalence_suite(args.seed, 1000, args.tol.unwrap_or(1e-10))],
        "unitarity" => vec![verify::unitarity_suite(args.seed, 500, args.tol.unwrap_or(1e-10))],
        "gates" => vec![verify::gate_equivalence_suite(args.tol.unwrap_or(1e-10))],
        "teleport" => vec![verify::teleportation_suite(args.seed, 100, args.tol.unwrap_or(1e-10))],
        "concurrence" => {
            vec![verify::concurrence_suite(args.seed, 10_000, args.tol.unwrap_or(1e-9))]
        }
        "tuning" => vec![verify::tuning_suite(args.seed, 400, args.tol.unwrap_or(1e-8))],
        "group" => vec![verify::group_structure_suite(args.seed, 500, args.tol.unwrap_or(1e-8))],
        other => return Err(CliError::Input(format!("unknown suite '{other}'"))),
    };
    let pass = reports.iter().all(|r| r.pass);
    let json = serde_json::json!({
        "seed": args.seed,
        "suites": reports,
        "pass": pass,
    });
    write_out(&args.out, &serde_json::to_string_pretty(&json).map_err(input_err)?)?;
    if !pass {
        let failing: Vec<&str> =
            reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
        return Err(CliError::Verification(failing.join(", ")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::SynthLoop(a) => cmd_synth_loop(a),
        Command::SynthExchange(a) => cmd_synth_exchange(a),
        Command::SynthForm(a) => cmd_synth_form(a),
        Command::Feasibility(a) => cmd_feasibility(a),
        Command::Trajectory(a) => cmd_trajectory(a),
        Command::Teleport(a) => cmd_teleport(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Verification(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Input(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
