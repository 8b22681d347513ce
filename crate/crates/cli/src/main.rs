//! chaoskit command line: build systems from config, analyze orbit pairs,
//! search scrambled families, and run verification harnesses with
//! deterministic JSON/CSV reports.

mod config;
mod pool;
mod report;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chaoskit::classify::{classify_pair, consistency_check, scrambled_search, ChaosFlag};
use chaoskit::distfn::{estimate_pair, SequenceSpec};
use chaoskit::Error;

use config::{FileConfig, Resolved};
use report::{write_json, write_text};

#[derive(Parser)]
#[command(
    name = "chaoskit",
    version,
    about = "Orbit-pair distribution functions and chaos verdicts for discrete dynamical systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect the built-in systems.
    Systems {
        #[command(subcommand)]
        cmd: SystemsCmd,
    },
    /// Estimate the distribution functions of one orbit pair and classify it.
    Analyze(AnalyzeArgs),
    /// Greedy search for a scrambled subset within a candidate family.
    Classify(ClassifyArgs),
    /// Run verification harnesses and report pass/fail per acceptance check.
    Suite(SuiteArgs),
}

#[derive(Subcommand)]
enum SystemsCmd {
    /// List the built-in system kinds.
    List,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// System kind: tent | logistic4 | rotation | shift2 | example1 | identity.
    #[arg(long)]
    system: Option<String>,
    /// Rotation angle in (0,1); defaults to the golden-ratio approximant.
    #[arg(long)]
    alpha: Option<f64>,
    /// The orbit pair: two comma-separated coordinates, or for shift2 two
    /// symbol prefixes ("0101,1100") or family patterns ("fam:101,fam:010").
    #[arg(long)]
    pair: Option<String>,
    /// Number of iterates to analyze.
    #[arg(long)]
    horizon: Option<u64>,
    /// Random seed (recorded in every report).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for estimate.csv and verdict.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checkpoints at or below this prefix length are ignored.
    #[arg(long)]
    burn_in: Option<u64>,
    /// Geometric checkpoint ratio.
    #[arg(long)]
    ratio: Option<f64>,
    /// Smallest scale of the t grid.
    #[arg(long)]
    grid_min: Option<f64>,
    /// Largest scale of the t grid.
    #[arg(long)]
    grid_max: Option<f64>,
    /// Number of grid scales.
    #[arg(long)]
    grid_count: Option<usize>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// System kind (the scrambled family lives in shift2).
    #[arg(long)]
    system: Option<String>,
    /// Number of family patterns to enumerate as candidates.
    #[arg(long)]
    family: Option<usize>,
    /// Relation flag: dc1 | dc2 | dc2prime | dc3 | liyorke.
    #[arg(long)]
    flag: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Estimate-is-zero tolerance.
    #[arg(long)]
    zero_tol: Option<f64>,
    /// Estimate-is-one tolerance.
    #[arg(long)]
    one_tol: Option<f64>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated harness names:
    /// theorem1, theorem2, lemma3, example1, remark3, rt, lattice.
    #[arg(long)]
    harness: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    /// Iterate power for theorem2/lemma3 (default: the {2,3,5} ladder).
    #[arg(long)]
    n: Option<u64>,
    /// Pairs sampled per system in the lattice sweep.
    #[arg(long)]
    pairs: Option<usize>,
    /// Restrict the lattice sweep to one system kind.
    #[arg(long)]
    system: Option<String>,
    /// Family patterns for the lattice's shift2 sweep.
    #[arg(long)]
    family: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Systems {
            cmd: SystemsCmd::List,
        } => run_systems_list(),
        Cmd::Analyze(args) => run_analyze(args),
        Cmd::Classify(args) => run_classify(args),
        Cmd::Suite(args) => suite::run_suite(args_to_suite(args)),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Chaoskit(Error::InsufficientData(_)) => 3,
        CliError::Chaoskit(_) => 2,
        CliError::Config(_) => 2,
        CliError::Io(_) => 1,
    }
}

#[derive(Debug)]
pub enum CliError {
    Chaoskit(Error),
    Config(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Chaoskit(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o failure: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Chaoskit(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn run_systems_list() -> CliResult<ExitCode> {
    println!("tent       exact ternary fixed-point tent map on [0,1]");
    println!("logistic4  floating-point logistic map 4x(1-x) on [0,1] (pseudo-orbit)");
    println!(
        "rotation   exact decimal fixed-point circle rotation; --alpha in (0,1), default {}",
        chaoskit::systems::GOLDEN_ALPHA
    );
    println!("shift2     full shift on two symbols, bit-packed prefixes, scrambled family built in");
    println!("example1   half-line block metric space with unit-step translation, exact block arithmetic");
    println!("identity   identity map on [0,1], control fixture");
    println!("iterate    N-fold composition of a base kind (config: {{\"kind\":\"iterate\",\"base\":{{...}},\"n\":N}})");
    Ok(ExitCode::SUCCESS)
}

fn args_to_suite(args: SuiteArgs) -> suite::SuiteRequest {
    suite::SuiteRequest {
        config: args.config,
        harness: args.harness,
        horizon: args.horizon,
        n: args.n,
        pairs: args.pairs,
        system: args.system,
        family: args.family,
        seed: args.seed,
        out: args.out,
    }
}

fn run_analyze(args: AnalyzeArgs) -> CliResult<ExitCode> {
    let mut file = FileConfig::load(args.config.as_deref())?;
    file.system_name = args.system.or(file.system_name.take());
    file.alpha = args.alpha.or(file.alpha.take());
    file.pair = args.pair.or(file.pair.take());
    file.horizon = args.horizon.or(file.horizon.take());
    file.seed = args.seed.or(file.seed.take());
    file.out_dir = args.out.or(file.out_dir.take());
    file.burn_in = args.burn_in.or(file.burn_in.take());
    file.ratio = args.ratio.or(file.ratio.take());
    file.grid_min = args.grid_min.or(file.grid_min.take());
    file.grid_max = args.grid_max.or(file.grid_max.take());
    file.grid_count = args.grid_count.or(file.grid_count.take());

    let resolved = Resolved::for_analyze(&file)?;
    let system = resolved.build_system()?;
    let (x, y) = resolved.build_pair(&system)?;
    let cfg = resolved.estimate_config(&system);

    let (_, est) = estimate_pair(&system, &x, &y, resolved.horizon, &cfg)?;
    let verdict = classify_pair(
        &system,
        &x,
        &y,
        resolved.horizon,
        &resolved.thresholds,
        &cfg,
        Some(&SequenceSpec::identity()),
    )?;
    let violations = consistency_check(&verdict);

    std::fs::create_dir_all(&resolved.out_dir)?;
    write_text(resolved.out_dir.join("estimate.csv"), &est.to_csv())?;
    let doc = serde_json::json!({
        "config": resolved,
        "pair": { "x": x.label(), "y": y.label() },
        "estimate": est,
        "verdict": verdict,
        "consistency_violations": violations,
    });
    write_json(resolved.out_dir.join("verdict.json"), &doc)?;
    println!(
        "wrote {} and {}",
        resolved.out_dir.join("estimate.csv").display(),
        resolved.out_dir.join("verdict.json").display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_classify(args: ClassifyArgs) -> CliResult<ExitCode> {
    let mut file = FileConfig::load(args.config.as_deref())?;
    file.system_name = args.system.or(file.system_name.take());
    file.family = args.family.or(file.family.take());
    file.flag = args.flag.or(file.flag.take());
    file.horizon = args.horizon.or(file.horizon.take());
    file.seed = args.seed.or(file.seed.take());
    file.out_dir = args.out.or(file.out_dir.take());
    if let Some(z) = args.zero_tol {
        file.thresholds.get_or_insert_with(Default::default).zero_tol = z;
    }
    if let Some(o) = args.one_tol {
        file.thresholds.get_or_insert_with(Default::default).one_tol = o;
    }

    let resolved = Resolved::for_classify(&file)?;
    let system = resolved.build_system()?;
    let candidates = resolved.build_family(&system)?;
    let flag: ChaosFlag = resolved.flag.parse().map_err(CliError::Chaoskit)?;
    let cfg = resolved.estimate_config(&system);
    let found = scrambled_search(
        &system,
        &candidates,
        resolved.horizon,
        &resolved.thresholds,
        &cfg,
        flag,
    )?;

    std::fs::create_dir_all(&resolved.out_dir)?;
    let doc = serde_json::json!({
        "config": resolved,
        "candidates": candidates.iter().map(|p| p.label()).collect::<Vec<_>>(),
        "search": found,
    });
    write_json(resolved.out_dir.join("scrambled.json"), &doc)?;
    println!(
        "clique of size {} among {} candidates (flag {flag:?}); wrote {}",
        found.members.len(),
        candidates.len(),
        resolved.out_dir.join("scrambled.json").display()
    );
    Ok(ExitCode::SUCCESS)
}
