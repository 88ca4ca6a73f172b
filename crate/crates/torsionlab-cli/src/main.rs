//! torsionlab command-line front end.
//!
//! Every subcommand reads one JSON experiment config (`--config`), expands
//! its sweep axes into row jobs, runs them on a worker pool, and writes a
//! CSV report with one header row and the config hash stamped on every
//! row. Row order is the declaration order of the sweep, independent of
//! scheduling, and all randomness comes from a single SplitMix64 seed, so
//! re-running a config reproduces the CSV byte for byte.
//!
//! Exit codes: 0 all assertions passed, 1 an asserted inequality failed,
//! 2 config or experiment-description error, 3 solver non-convergence.

mod jobs;
mod log;

use clap::{Args, Parser, Subcommand};
use jobs::{Job, RowFailure, RowOutcome};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;
use torsionlab::config::{ExperimentConfig, ExperimentKind};
use torsionlab::report::{fnv1a_64, CsvTable};

/// Seed used when neither the config nor --seed provides one.
const DEFAULT_SEED: u64 = 0x7054_1ab0;

#[derive(Parser)]
#[command(
    name = "torsionlab",
    version,
    about = "Torsional rigidity experiments on manifolds of revolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (defaults to the config's `output`, then stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker pool size (defaults to the number of processors).
    #[arg(long)]
    jobs: Option<usize>,
    /// PRNG seed override (SplitMix64).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Radial-oracle rigidity of geodesic balls.
    BallRigidity(RunArgs),
    /// One finite-element torsion solve with diagnostics.
    FemSolve(RunArgs),
    /// Symmetrize a FEM field and check the moment/energy identities.
    Symmetrize(RunArgs),
    /// Compare a FEM domain against its symmetrized model ball.
    Compare(RunArgs),
    /// Model radius R(K, D) sweeps.
    Rkd(RunArgs),
    /// Perelman gap factor sweeps.
    Perelman(RunArgs),
    /// Cheeger sharpness family sweeps.
    CheegerFamily(RunArgs),
    /// Run property verification suites.
    Verify(RunArgs),
}

impl Command {
    fn expected_kind(&self) -> &'static str {
        match self {
            Command::BallRigidity(_) => "ball-rigidity",
            Command::FemSolve(_) => "fem-solve",
            Command::Symmetrize(_) => "symmetrize",
            Command::Compare(_) => "compare",
            Command::Rkd(_) => "rkd",
            Command::Perelman(_) => "perelman",
            Command::CheegerFamily(_) => "cheeger-family",
            Command::Verify(_) => "verify",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::BallRigidity(a)
            | Command::FemSolve(a)
            | Command::Symmetrize(a)
            | Command::Compare(a)
            | Command::Rkd(a)
            | Command::Perelman(a)
            | Command::CheegerFamily(a)
            | Command::Verify(a) => a,
        }
    }
}

fn kind_name(kind: &ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::BallRigidity { .. } => "ball-rigidity",
        ExperimentKind::FemSolve { .. } => "fem-solve",
        ExperimentKind::Symmetrize { .. } => "symmetrize",
        ExperimentKind::Compare { .. } => "compare",
        ExperimentKind::Rkd { .. } => "rkd",
        ExperimentKind::Perelman { .. } => "perelman",
        ExperimentKind::CheegerFamily { .. } => "cheeger-family",
        ExperimentKind::Verify { .. } => "verify",
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(&cli.command));
}

fn run(command: &Command) -> i32 {
    let args = command.args();

    let raw = match std::fs::read(&args.config) {
        Ok(bytes) => bytes,
        Err(e) => {
            log::error(&format!("cannot read config {}: {e}", args.config.display()));
            return 2;
        }
    };
    let hash = fnv1a_64(&raw);
    let text = match String::from_utf8(raw) {
        Ok(t) => t,
        Err(e) => {
            log::error(&format!("config is not UTF-8: {e}"));
            return 2;
        }
    };
    let mut config = match ExperimentConfig::from_json_str(&text) {
        Ok(c) => c,
        Err(e) => {
            log::error(&format!("config error: {e}"));
            return 2;
        }
    };
    let kind = kind_name(&config.experiment);
    if kind != command.expected_kind() {
        log::error(&format!(
            "config kind `{kind}` does not match subcommand `{}`",
            command.expected_kind()
        ));
        return 2;
    }
    if let Err(code) = resolve_profiles(&mut config, &args.config) {
        return code;
    }

    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let workers = args
        .jobs
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .max(1);
    log::debug(&format!(
        "config {} (hash {hash:016x}), seed {seed}, {workers} workers",
        args.config.display()
    ));

    let (header, job_list) = jobs::build_jobs(&config, hash, seed);
    let started = Instant::now();
    let rows = run_pool(job_list, workers);
    let wall = started.elapsed();

    let mut table = CsvTable::new(header);
    let mut any_fail = false;
    let mut any_nonconv = false;
    let mut any_invalid = false;
    for row in &rows {
        log::info(&row.summary);
        if !row.pass {
            any_fail = true;
            log::error(&format!("failed row: {}", row.cells.first().cloned().unwrap_or_default()));
        }
        match &row.failure {
            Some(RowFailure::NonConvergence(_)) => any_nonconv = true,
            Some(RowFailure::Invalid(_)) => any_invalid = true,
            None => {}
        }
        table.push_row(row.cells.clone());
    }
    log::info(&format!(
        "{} row(s) in {:.1} ms",
        table.row_count(),
        wall.as_secs_f64() * 1e3
    ));

    let out_path = args
        .out
        .clone()
        .or_else(|| config.output.as_ref().map(PathBuf::from));
    let csv = table.to_string();
    match out_path {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                log::error(&format!("cannot write {}: {e}", path.display()));
                return 2;
            }
            log::info(&format!("report written to {}", path.display()));
        }
        None => print!("{csv}"),
    }

    if any_invalid {
        2
    } else if any_nonconv {
        3
    } else if any_fail {
        1
    } else {
        0
    }
}

/// Load `profile_csv` tables (paths relative to the config file) into
/// inline profiles so that job construction never touches the filesystem.
fn resolve_profiles(config: &mut ExperimentConfig, config_path: &Path) -> Result<(), i32> {
    let base = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let load = |mc: &mut torsionlab::config::ManifoldConfig| -> Result<(), i32> {
        if let Some(rel) = &mc.profile_csv {
            let path = base.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                log::error(&format!("cannot read profile table {}: {e}", path.display()));
                2
            })?;
            let table = torsionlab::config::parse_profile_csv(&text).map_err(|e| {
                log::error(&format!("profile table {}: {e}", path.display()));
                2
            })?;
            mc.profile = Some(table);
            mc.profile_csv = None;
        }
        Ok(())
    };
    match &mut config.experiment {
        ExperimentKind::BallRigidity { manifold, .. } => load(manifold),
        ExperimentKind::FemSolve { manifold, .. } => load(manifold),
        ExperimentKind::Symmetrize { manifold, model, .. }
        | ExperimentKind::Compare { manifold, model, .. } => {
            load(manifold)?;
            load(model)
        }
        _ => Ok(()),
    }
}

/// Run jobs on `workers` threads; row order follows job order.
fn run_pool(job_list: Vec<Job>, workers: usize) -> Vec<RowOutcome> {
    let n = job_list.len();
    let slots: Vec<Mutex<Option<Job>>> = job_list.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Vec<RowOutcome>>> = (0..n).map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers.min(n.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let job = slots[i].lock().expect("job slot").take().expect("job taken once");
                let rows = job();
                *results[i].lock().expect("result slot") = rows;
            });
        }
    });

    results
        .into_iter()
        .flat_map(|m| m.into_inner().expect("pool finished"))
        .collect()
}
