use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nygrad::bench::{self, BenchError, Metric, ResultRow, Suite};
use nygrad::parallel::Execution;
use nygrad::problems::gradient_errors;
use nygrad::{ProblemKind, ProblemSpec, SolverConfig};

#[derive(Parser)]
#[command(name = "nygrad", version, about = "Gradient methods with three-dimensional quadratic termination")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one solver on one problem.
    Solve(SolveArgs),
    /// Run a predefined solver × problem matrix.
    Bench(BenchArgs),
    /// Performance profile of a result file.
    Profile(ProfileArgs),
    /// Compare a problem's analytic gradient against central differences.
    CheckGrad(CheckGradArgs),
}

#[derive(Args)]
struct Tunables {
    /// Cycle length of the cyclic strategies.
    #[arg(long = "T", alias = "t")]
    t: Option<usize>,
    /// Relative gradient tolerance.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long)]
    alpha_max: Option<f64>,
    /// Nonmonotone memory length.
    #[arg(long = "M", alias = "m")]
    m: Option<usize>,
    /// Sufficient-decrease constant.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Tunables {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig { seed: self.seed, ..SolverConfig::default() };
        if let Some(v) = self.t {
            cfg.cycle_len = v;
        }
        if let Some(v) = self.eps {
            cfg.epsilon = v;
        }
        if let Some(v) = self.alpha_min {
            cfg.alpha_min = v;
        }
        if let Some(v) = self.alpha_max {
            cfg.alpha_max = v;
        }
        if let Some(v) = self.m {
            cfg.memory = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        cfg
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    n: usize,
    /// Strategy name, or `proposed` for NY/ANY.
    #[arg(long, default_value = bench::PROPOSED)]
    solver: String,
    /// Condition parameter of problems 2 and 3.
    #[arg(long, default_value_t = 1e6)]
    kappa: f64,
    #[command(flatten)]
    tun: Tunables,
    /// CSV, or JSON when the name ends in `.json`; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "paper")]
    suite: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Comma-separated solver list overriding the suite's.
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    tun: Tunables,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "iterations")]
    metric: String,
    /// Number of log₂τ grid points.
    #[arg(long, default_value_t = 64)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckGradArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    perturbations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Invalid(m) => Failure::Input(m),
            other => Failure::Internal(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.cmd {
        Cmd::Solve(a) => solve(a),
        Cmd::Bench(a) => run_bench(a),
        Cmd::Profile(a) => profile(a),
        Cmd::CheckGrad(a) => check_grad(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}

fn parse_problem(name: &str) -> Result<ProblemKind, Failure> {
    name.parse().map_err(|e: nygrad::problems::ProblemError| Failure::Input(e.to_string()))
}

fn is_json(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn emit(rows: &[ResultRow], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?;
            let w = BufWriter::new(f);
            if is_json(p) {
                bench::write_json(rows, w)?;
            } else {
                bench::write_csv(rows, w)?;
            }
        }
        None => bench::write_csv(rows, io::stdout().lock())?,
    }
    Ok(())
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let kind = parse_problem(&a.problem)?;
    let spec = ProblemSpec::new(kind, a.n).with_kappa(a.kappa);
    for note in spec.notes() {
        log::info!("{kind}: {note}");
    }
    let rows = bench::run_matrix(&[a.solver.clone()], &[spec], &a.tun.config(), 1, Execution::Sequential)?;
    let Some(row) = rows.first() else {
        return Err(Failure::Input(format!("{} needs a quadratic problem", a.solver)));
    };
    eprintln!(
        "{} on {} (n = {}): {} after {} iterations, |g| = {:.3e}, {:.3} s",
        row.solver, row.problem, row.n, row.status, row.iterations, row.final_gnorm, row.time_s
    );
    emit(&rows, a.out.as_deref())
}

fn run_bench(a: BenchArgs) -> Result<(), Failure> {
    let suite: Suite = a.suite.parse()?;
    let solvers = a.solvers.unwrap_or_else(|| suite.solvers());
    let mode = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let rows = bench::run_matrix(&solvers, &suite.problems(), &a.tun.config(), a.reps, mode)?;
    let solved = rows.iter().filter(|r| r.solved()).count();
    eprintln!("{} runs, {solved} converged", rows.len());
    for (s, v) in bench::avg_ls_counts(&rows).mean {
        eprintln!("{s}: {v:.4} extra line-search trials per iteration");
    }
    emit(&rows, a.out.as_deref())
}

fn profile(a: ProfileArgs) -> Result<(), Failure> {
    let metric: Metric = a.metric.parse()?;
    let f = File::open(&a.input).map_err(|e| Failure::Input(format!("{}: {e}", a.input.display())))?;
    let r = BufReader::new(f);
    let rows = if is_json(&a.input) { bench::read_json(r) } else { bench::read_csv(r) }
        .map_err(|e| Failure::Input(e.to_string()))?;
    let prof = bench::performance_profile(&rows, metric)?;
    let grid = prof.default_grid(a.points);
    let write = |w: &mut dyn Write| -> Result<(), BenchError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["solver", "log2_tau", "rho"])?;
        for (s, l, rho) in prof.sample(&grid) {
            wr.write_record([s, l.to_string(), rho.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    };
    match &a.out {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?;
            write(&mut BufWriter::new(f))?;
        }
        None => write(&mut io::stdout().lock())?,
    }
    if !prof.excluded.is_empty() {
        eprintln!("{} problem instances excluded: no solver converged", prof.excluded.len());
    }
    Ok(())
}

fn check_grad(a: CheckGradArgs) -> Result<(), Failure> {
    let kind = parse_problem(&a.problem)?;
    let problem = ProblemSpec::new(kind, a.n).build().map_err(|e| Failure::Input(e.to_string()))?;
    let errs = gradient_errors(problem.objective(), a.perturbations, a.seed);
    let worst = errs.iter().copied().fold(0.0f64, f64::max);
    println!("{kind} n = {}: at x0 {:.3e}, worst over {} points {:.3e}", a.n, errs[0], errs.len(), worst);
    if worst > 1e-6 {
        println!("gradient check above 1e-6");
    }
    Ok(())
}
