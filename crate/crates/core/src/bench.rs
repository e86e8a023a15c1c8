//! Solver × problem matrices, result files, performance profiles and
//! line-search statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{SolverConfig, Status};
use crate::parallel::{self, Execution};
use crate::problems::{ProblemKind, ProblemSpec};
use crate::solvers::{solve_strategy, Strategy, Target};

/// Solver label that resolves to NY on quadratics and ANY elsewhere.
pub const PROPOSED: &str = "proposed";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// One solver run on one problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: String,
    pub n: usize,
    pub solver: String,
    pub seed: u64,
    pub status: Status,
    pub iterations: usize,
    pub f_evals: usize,
    pub g_evals: usize,
    pub ls_extra: usize,
    pub final_gnorm: f64,
    pub time_s: f64,
}

impl ResultRow {
    pub fn solved(&self) -> bool {
        self.status == Status::Converged
    }

    fn sort_key(&self) -> (&str, usize, &str, u64) {
        (&self.problem, self.n, &self.solver, self.seed)
    }
}

/// Strategy used for `solver` on a problem, or `None` when the pair is
/// incompatible (a quadratic-only rule on a general objective).
pub fn resolve_solver(solver: &str, quadratic: bool, cfg: &SolverConfig) -> Result<Option<Strategy>, BenchError> {
    let strategy = if solver.eq_ignore_ascii_case(PROPOSED) {
        if quadratic {
            Strategy::NY { t: cfg.cycle_len }
        } else {
            Strategy::ANY { t: cfg.cycle_len }
        }
    } else {
        Strategy::from_name(solver, cfg).ok_or_else(|| BenchError::Invalid(format!("unknown solver `{solver}`")))?
    };
    Ok((quadratic || !strategy.quadratic_only()).then_some(strategy))
}

struct Cell {
    spec: ProblemSpec,
    solver: String,
    strategy: Strategy,
}

/// Runs every solver on every problem `repetitions` times.
///
/// Repetition `r` uses seed `cfg.seed + r`, which only affects the randomised
/// quadratics. Incompatible solver/problem pairs are skipped with a warning;
/// solver errors become `NumericalFailure` rows. Rows are sorted by
/// `(problem, n, solver, seed)`.
pub fn run_matrix(
    solvers: &[String],
    problems: &[ProblemSpec],
    cfg: &SolverConfig,
    repetitions: usize,
    mode: Execution,
) -> Result<Vec<ResultRow>, BenchError> {
    if solvers.is_empty() || problems.is_empty() || repetitions == 0 {
        return Err(BenchError::Invalid("need at least one solver, one problem and one repetition".into()));
    }
    cfg.validate().map_err(|e| BenchError::Invalid(e.to_string()))?;
    let mut cells = Vec::new();
    for spec in problems {
        // surface dimension errors before any solve starts
        spec.build().map_err(|e| BenchError::Invalid(e.to_string()))?;
        for solver in solvers {
            match resolve_solver(solver, spec.kind.is_quadratic(), cfg)? {
                Some(strategy) => {
                    for r in 0..repetitions {
                        let spec = spec.clone().with_seed(cfg.seed + r as u64);
                        cells.push(Cell { spec, solver: solver.clone(), strategy });
                    }
                }
                None => log::warn!("skipping {solver} on {}: needs a quadratic", spec.kind),
            }
        }
    }
    if solvers.iter().any(|s| s.eq_ignore_ascii_case(PROPOSED)) && problems.iter().any(|p| p.kind.is_quadratic()) {
        log::info!("`{PROPOSED}` runs NY on problems 1-3 and ANY on the others");
    }
    let mut rows = parallel::map(&cells, mode, parallel::threads_from_env(), |c| run_cell(c, cfg));
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(rows)
}

fn run_cell(cell: &Cell, cfg: &SolverConfig) -> ResultRow {
    let mut row = ResultRow {
        problem: cell.spec.kind.name().to_string(),
        n: cell.spec.n,
        solver: cell.solver.clone(),
        seed: cell.spec.seed,
        status: Status::NumericalFailure,
        iterations: 0,
        f_evals: 0,
        g_evals: 0,
        ls_extra: 0,
        final_gnorm: f64::NAN,
        time_s: 0.0,
    };
    let problem = match cell.spec.build() {
        Ok(p) => p,
        Err(e) => {
            log::warn!("{}: {e}", row.problem);
            return row;
        }
    };
    match solve_strategy(Target::from(&problem), cell.strategy, cfg) {
        Ok(r) => {
            row.status = r.status;
            row.iterations = r.iterations;
            row.f_evals = r.f_evals;
            row.g_evals = r.g_evals;
            row.ls_extra = r.ls_extra_trials;
            row.final_gnorm = r.final_gnorm;
            row.time_s = r.wall_time;
        }
        Err(e) => log::warn!("{} on {} (seed {}): {e}", row.solver, row.problem, row.seed),
    }
    row
}

pub fn write_csv<W: Write>(rows: &[ResultRow], w: W) -> Result<(), BenchError> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ResultRow>, BenchError> {
    let mut rd = csv::Reader::from_reader(r);
    Ok(rd.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_json<W: Write>(rows: &[ResultRow], w: W) -> Result<(), BenchError> {
    serde_json::to_writer_pretty(w, rows)?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<Vec<ResultRow>, BenchError> {
    Ok(serde_json::from_reader(r)?)
}

/// Quantity compared in a performance profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Time,
    Iterations,
    FEvals,
    GEvals,
}

impl Metric {
    fn of(&self, r: &ResultRow) -> f64 {
        match self {
            Metric::Time => r.time_s,
            Metric::Iterations => r.iterations as f64,
            Metric::FEvals => r.f_evals as f64,
            Metric::GEvals => r.g_evals as f64,
        }
    }
}

impl FromStr for Metric {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "time" => Ok(Metric::Time),
            "iterations" | "iter" => Ok(Metric::Iterations),
            "fevals" | "f_evals" => Ok(Metric::FEvals),
            "gevals" | "g_evals" => Ok(Metric::GEvals),
            other => Err(BenchError::Invalid(format!("unknown metric `{other}`"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Time => "time",
            Metric::Iterations => "iterations",
            Metric::FEvals => "fevals",
            Metric::GEvals => "gevals",
        })
    }
}

/// `ρ_s(τ)` for one solver as a right-continuous step function.
///
/// `tau[i]` are the distinct finite ratios attained by this solver, ascending;
/// `rho[i]` is the fraction of problems solved within `tau[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub solver: String,
    pub tau: Vec<f64>,
    pub rho: Vec<f64>,
}

impl ProfileCurve {
    pub fn rho_at(&self, tau: f64) -> f64 {
        match self.tau.partition_point(|t| *t <= tau) {
            0 => 0.0,
            i => self.rho[i - 1],
        }
    }

    /// Fraction of problems solved at all.
    pub fn solved_fraction(&self) -> f64 {
        self.rho.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub metric: Metric,
    pub curves: Vec<ProfileCurve>,
    /// Problem instances `(problem, n, seed)` in the profile.
    pub problems: Vec<(String, usize, u64)>,
    /// Instances dropped because no solver solved them.
    pub excluded: Vec<(String, usize, u64)>,
}

impl Profile {
    pub fn curve(&self, solver: &str) -> Option<&ProfileCurve> {
        self.curves.iter().find(|c| c.solver == solver)
    }

    /// Samples every curve on `log2_grid`, as `(solver, log₂τ, ρ)` rows.
    pub fn sample(&self, log2_grid: &[f64]) -> Vec<(String, f64, f64)> {
        self.curves
            .iter()
            .flat_map(|c| log2_grid.iter().map(move |&l| (c.solver.clone(), l, c.rho_at(l.exp2()))))
            .collect()
    }

    /// Evenly spaced `log₂τ` grid from 0 to the largest finite ratio.
    pub fn default_grid(&self, points: usize) -> Vec<f64> {
        let top = self.curves.iter().filter_map(|c| c.tau.last()).fold(1.0f64, |a, &b| a.max(b)).log2();
        let points = points.max(2);
        (0..points).map(|i| top * i as f64 / (points - 1) as f64).collect()
    }
}

/// Dolan–Moré performance profile over problem instances `(problem, n, seed)`.
///
/// Unsolved runs, and solvers with no row for an instance, get ratio `∞`.
/// When the best value is zero, equal values get ratio 1 and the rest `∞`.
pub fn performance_profile(rows: &[ResultRow], metric: Metric) -> Result<Profile, BenchError> {
    if rows.is_empty() {
        return Err(BenchError::Invalid("no rows to profile".into()));
    }
    let solvers: BTreeSet<&str> = rows.iter().map(|r| r.solver.as_str()).collect();
    let mut by_problem: BTreeMap<(String, usize, u64), BTreeMap<&str, f64>> = BTreeMap::new();
    for r in rows {
        let v = if r.solved() { metric.of(r) } else { f64::INFINITY };
        let e = by_problem.entry((r.problem.clone(), r.n, r.seed)).or_default();
        let slot = e.entry(r.solver.as_str()).or_insert(f64::INFINITY);
        *slot = slot.min(v);
    }
    let mut problems = Vec::new();
    let mut excluded = Vec::new();
    let mut ratios: BTreeMap<&str, Vec<f64>> = solvers.iter().map(|s| (*s, Vec::new())).collect();
    for (key, vals) in by_problem {
        let best = vals.values().copied().fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            log::warn!("no solver solved {} (n = {}, seed = {}); excluded from the profile", key.0, key.1, key.2);
            excluded.push(key);
            continue;
        }
        for s in &solvers {
            let v = vals.get(s).copied().unwrap_or(f64::INFINITY);
            let r = if best > 0.0 {
                v / best
            } else if v == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            ratios.get_mut(s).expect("solver key").push(r);
        }
        problems.push(key);
    }
    let np = problems.len() as f64;
    let curves = ratios
        .into_iter()
        .map(|(s, mut rs)| {
            rs.retain(|r| r.is_finite());
            rs.sort_by(f64::total_cmp);
            let mut tau: Vec<f64> = Vec::new();
            let mut rho: Vec<f64> = Vec::new();
            for (i, r) in rs.iter().enumerate() {
                let frac = (i + 1) as f64 / np;
                if tau.last() == Some(r) {
                    *rho.last_mut().expect("paired") = frac;
                } else {
                    tau.push(*r);
                    rho.push(frac);
                }
            }
            ProfileCurve { solver: s.to_string(), tau, rho }
        })
        .collect();
    Ok(Profile { metric, curves, problems, excluded })
}

/// Average extra line-search trials per iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LsCounts {
    /// `Σ ls_extra / Σ iterations` per `(solver, problem)`.
    pub per_problem: BTreeMap<(String, String), f64>,
    /// Mean of the per-problem values, per solver.
    pub mean: BTreeMap<String, f64>,
}

/// Line-search statistics over converged rows. Problems on which a solver
/// took no iterations are left out.
pub fn avg_ls_counts(rows: &[ResultRow]) -> LsCounts {
    let mut sums: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.solved()) {
        let e = sums.entry((r.solver.clone(), r.problem.clone())).or_default();
        e.0 += r.ls_extra;
        e.1 += r.iterations;
    }
    let mut out = LsCounts::default();
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for ((solver, problem), (extra, iters)) in sums {
        if iters == 0 {
            continue;
        }
        let v = extra as f64 / iters as f64;
        let a = acc.entry(solver.clone()).or_default();
        a.0 += v;
        a.1 += 1;
        out.per_problem.insert((solver, problem), v);
    }
    out.mean = acc.into_iter().map(|(s, (sum, c))| (s, sum / c as f64)).collect();
    out
}

/// Predefined benchmark matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Problems 1–9 at `n ∈ {10⁴, 10⁵}` against ABBmin, MPSG and SL(YV).
    Paper,
    /// Problems 1–9 at `n ≈ 10³`.
    Quick,
}

impl Suite {
    pub fn problems(&self) -> Vec<ProblemSpec> {
        let sizes: &[usize] = match self {
            Suite::Paper => &[10_000, 100_000],
            Suite::Quick => &[1_000],
        };
        sizes
            .iter()
            .flat_map(|&n| ProblemKind::ALL.into_iter().map(move |k| ProblemSpec::new(k, suite_dim(k, n))))
            .collect()
    }

    pub fn solvers(&self) -> Vec<String> {
        [PROPOSED, "abbmin", "mpsg", "sl-yv"].map(String::from).to_vec()
    }
}

/// DIXMAANJ needs `3 | n`; other problems take `n` as is.
fn suite_dim(kind: ProblemKind, n: usize) -> usize {
    if kind == ProblemKind::Dixmaanj {
        n - n % 3
    } else {
        n
    }
}

impl FromStr for Suite {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(Suite::Paper),
            "quick" => Ok(Suite::Quick),
            other => Err(BenchError::Invalid(format!("unknown suite `{other}`"))),
        }
    }
}
