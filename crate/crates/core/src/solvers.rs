//! Gradient solvers built on the stepsize rules.
//!
//! Quadratic problems run without a line search: every strategy picks `α_k`
//! and steps to `x_k − α_k g_k`. General objectives run with a nonmonotone
//! line search, the improved GLL search for ANY and fixed-factor backtracking
//! for the BB family.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{axpy, dot, norm};
use crate::linesearch::{asd, gll_backtrack, improved_gll, LineSearchError, NonmonotoneMemory};
use crate::model::{
    quadratic_value_gradient, Evaluator, IterationTrace, ModelError, Objective, QuadraticProblem, RunReport,
    SolverConfig, Status, StepHistory, StepKind,
};
use crate::problems::Problem;
use crate::stepsize::{
    abbmin, bb1_pair, bb2_pair, mpsg, ny_coefficients, ny_stepsizes, ny_step, yuan, yuan_variant, StepsizeError,
};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} is defined for quadratic problems only")]
    RequiresQuadratic(String),
    #[error("expected a 3-dimensional problem, got n = {0}")]
    NotThreeDimensional(usize),
    #[error("invalid strategy parameters: {0}")]
    InvalidStrategy(String),
    #[error(transparent)]
    Stepsize(#[from] StepsizeError),
}

/// Position of iteration `k` inside a cycle of length `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclePhase {
    pub k: usize,
    pub t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleRole {
    /// Exact or approximate Cauchy step.
    Cauchy,
    /// Fresh three-dimensional (NY/ANY) step.
    ThreeDim,
    /// Repeat the previous stepsize.
    Reuse,
}

impl CyclePhase {
    pub fn new(k: usize, t: usize) -> Self {
        assert!(t >= 3, "cycle length must be at least 3");
        Self { k, t }
    }

    pub fn slot(&self) -> usize {
        self.k % self.t
    }

    pub fn role(&self) -> CycleRole {
        match self.slot() {
            0 | 1 => CycleRole::Cauchy,
            2 => CycleRole::ThreeDim,
            _ => CycleRole::Reuse,
        }
    }
}

/// Fixed stepsize used by the SL cycle, formed from two consecutive Cauchy steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlVariant {
    YV,
    HarmonicMean,
    Fmin,
    Fmax,
}

impl SlVariant {
    pub fn name(&self) -> &'static str {
        match self {
            SlVariant::YV => "yv",
            SlVariant::HarmonicMean => "hm",
            SlVariant::Fmin => "fmin",
            SlVariant::Fmax => "fmax",
        }
    }

    /// The fixed step from Cauchy steps `sd_prev`, `sd_cur` taken at gradients of
    /// norm `gnorm_prev`, `gnorm_cur`.
    pub fn fixed_step(&self, sd_prev: f64, sd_cur: f64, gnorm_cur: f64, gnorm_prev: f64) -> Result<f64, StepsizeError> {
        match self {
            SlVariant::YV => yuan_variant(sd_prev, sd_cur, gnorm_cur, gnorm_prev),
            SlVariant::HarmonicMean => Ok(1.0 / (1.0 / sd_prev + 1.0 / sd_cur)),
            SlVariant::Fmin => Ok(sd_prev.min(sd_cur)),
            SlVariant::Fmax => Ok(sd_prev.max(sd_cur)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    SD,
    BB1,
    BB2,
    ABBmin,
    MPSG,
    SDC { h: usize, m: usize },
    SL { variant: SlVariant, t: usize },
    NY { t: usize },
    ANY { t: usize },
}

impl Strategy {
    /// Looks up a strategy by its CLI name, taking cycle parameters from `cfg`.
    pub fn from_name(name: &str, cfg: &SolverConfig) -> Option<Strategy> {
        let t = cfg.cycle_len;
        Some(match name.to_ascii_lowercase().as_str() {
            "sd" => Strategy::SD,
            "bb1" => Strategy::BB1,
            "bb2" => Strategy::BB2,
            "abbmin" => Strategy::ABBmin,
            "mpsg" => Strategy::MPSG,
            "sdc" => Strategy::SDC { h: cfg.sdc_h, m: cfg.sdc_m },
            "sl-yv" | "sl" => Strategy::SL { variant: SlVariant::YV, t },
            "sl-hm" => Strategy::SL { variant: SlVariant::HarmonicMean, t },
            "sl-fmin" => Strategy::SL { variant: SlVariant::Fmin, t },
            "sl-fmax" => Strategy::SL { variant: SlVariant::Fmax, t },
            "ny" => Strategy::NY { t },
            "any" => Strategy::ANY { t },
            _ => return None,
        })
    }

    pub fn name(&self) -> String {
        match self {
            Strategy::SD => "sd".into(),
            Strategy::BB1 => "bb1".into(),
            Strategy::BB2 => "bb2".into(),
            Strategy::ABBmin => "abbmin".into(),
            Strategy::MPSG => "mpsg".into(),
            Strategy::SDC { .. } => "sdc".into(),
            Strategy::SL { variant, .. } => format!("sl-{}", variant.name()),
            Strategy::NY { .. } => "ny".into(),
            Strategy::ANY { .. } => "any".into(),
        }
    }

    /// Strategies that need an exact Cauchy step.
    pub fn quadratic_only(&self) -> bool {
        matches!(self, Strategy::SD | Strategy::SDC { .. } | Strategy::SL { .. } | Strategy::NY { .. })
    }

    fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidStrategy(m.into()));
        match *self {
            Strategy::SDC { h, m } if h < 2 || m < 1 => bad("SDC needs h >= 2 and m >= 1"),
            Strategy::SL { t, .. } | Strategy::NY { t } | Strategy::ANY { t } if t < 3 => {
                bad("cycle length must be at least 3")
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// What a solver runs on.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Quadratic(&'a QuadraticProblem),
    General(&'a dyn Objective),
}

impl<'a> From<&'a Problem> for Target<'a> {
    fn from(p: &'a Problem) -> Self {
        match p {
            Problem::Quadratic(q) => Target::Quadratic(q),
            Problem::General(o) => Target::General(o.as_ref()),
        }
    }
}

impl<'a> From<&'a QuadraticProblem> for Target<'a> {
    fn from(p: &'a QuadraticProblem) -> Self {
        Target::Quadratic(p)
    }
}

/// Which scheme [`five_step_3d`] ended up running.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiveStepPath {
    /// SD, SD, NY(1), NY(2), SD.
    Ny,
    /// The gradients spanned only a plane: SD, Yuan, SD.
    Yuan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiveStepOutcome {
    pub x_star: Vec<f64>,
    /// `‖g_0‖, ‖g_1‖, …` along the path actually taken.
    pub gnorms: Vec<f64>,
    pub steps: Vec<f64>,
    pub path: FiveStepPath,
}

/// Minimises a 3-D quadratic with two Cauchy steps, the two shortest NY steps
/// and a final Cauchy step. Stops early on an exactly zero gradient.
///
/// Gradients are carried by `g ← g − αHg`; `gnorms` are evaluated from
/// `Hx + b` at every iterate.
pub fn five_step_3d(p: &QuadraticProblem) -> Result<FiveStepOutcome, SolverError> {
    if p.dim() != 3 {
        return Err(SolverError::NotThreeDimensional(p.dim()));
    }
    let true_gnorm = |x: &[f64]| p.value_gradient(x).map(|(_, g)| norm(&g));
    let mut x = p.x0().to_vec();
    let (_, mut g) = p.value_gradient(&x)?;
    let mut out = FiveStepOutcome { x_star: vec![], gnorms: vec![norm(&g)], steps: vec![], path: FiveStepPath::Ny };

    let advance = |x: &mut Vec<f64>, g: &mut Vec<f64>, out: &mut FiveStepOutcome, alpha: f64| {
        let hg = p.hessian().apply(g);
        axpy(-alpha, g, x);
        axpy(-alpha, &hg, g);
        out.gnorms.push(true_gnorm(x)?);
        out.steps.push(alpha);
        Ok::<bool, SolverError>(out.gnorms.last() == Some(&0.0))
    };
    macro_rules! step_or_finish {
        ($alpha:expr) => {
            if advance(&mut x, &mut g, &mut out, $alpha)? {
                out.x_star = x;
                return Ok(out);
            }
        };
    }

    if out.gnorms[0] == 0.0 {
        out.x_star = x;
        return Ok(out);
    }
    let g0 = g.clone();
    let sd0 = p.cauchy_step(&g)?;
    step_or_finish!(sd0);
    let (x1, g1) = (x.clone(), g.clone());
    let sd1 = p.cauchy_step(&g)?;
    step_or_finish!(sd1);
    let sd2 = p.cauchy_step(&g)?;
    match ny_coefficients(sd0, sd1, sd2, &g0, &g1, &g).and_then(|c| ny_stepsizes(&c)) {
        Ok([a1, a2, _]) => {
            step_or_finish!(a1);
            step_or_finish!(a2);
            let sd4 = p.cauchy_step(&g)?;
            step_or_finish!(sd4);
        }
        Err(e) => {
            log::debug!("three-dimensional step unavailable ({e}); switching to the Yuan scheme");
            out.path = FiveStepPath::Yuan;
            out.gnorms.truncate(2);
            out.steps.truncate(1);
            x = x1;
            g = g1;
            let ay = yuan(sd0, sd1, norm(&g), sd0 * norm(&g0))?;
            step_or_finish!(ay);
            let sd = p.cauchy_step(&g)?;
            step_or_finish!(sd);
        }
    }
    out.x_star = x;
    Ok(out)
}

/// Cyclic NY method on a quadratic: Cauchy steps in slots 0 and 1, the shortest
/// NY step in slot 2, and that step repeated for the rest of the cycle.
pub fn solve_ny(p: &QuadraticProblem, cfg: &SolverConfig) -> Result<RunReport, SolverError> {
    solve_strategy(Target::Quadratic(p), Strategy::NY { t: cfg.cycle_len }, cfg)
}

/// Cyclic ANY method with the improved GLL line search on a general objective.
pub fn solve_any(obj: &dyn Objective, cfg: &SolverConfig) -> Result<RunReport, SolverError> {
    solve_strategy(Target::General(obj), Strategy::ANY { t: cfg.cycle_len }, cfg)
}

pub fn solve_strategy(target: Target<'_>, strategy: Strategy, cfg: &SolverConfig) -> Result<RunReport, SolverError> {
    cfg.validate()?;
    strategy.validate()?;
    match (target, strategy) {
        (Target::Quadratic(p), Strategy::ANY { .. }) => run_general(p, strategy, cfg),
        (Target::Quadratic(p), _) => run_quadratic(p, strategy, cfg),
        (Target::General(_), s) if s.quadratic_only() => Err(SolverError::RequiresQuadratic(s.name())),
        (Target::General(obj), _) => run_general(obj, strategy, cfg),
    }
}

struct Choice {
    alpha: f64,
    kind: StepKind,
    stepsize_f_evals: usize,
    fallback: bool,
}

impl Choice {
    fn new(alpha: f64, kind: StepKind) -> Self {
        Self { alpha, kind, stepsize_f_evals: 0, fallback: false }
    }
}

struct Recorder {
    start: Instant,
    trace: Option<Vec<IterationTrace>>,
    fallbacks: usize,
    ls_extra: usize,
}

impl Recorder {
    fn new(cfg: &SolverConfig) -> Self {
        Self { start: Instant::now(), trace: cfg.record_trace.then(Vec::new), fallbacks: 0, ls_extra: 0 }
    }

    fn record(&mut self, t: IterationTrace) {
        self.ls_extra += t.ls_extra;
        if let Some(tr) = self.trace.as_mut() {
            tr.push(t);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        self,
        status: Status,
        iterations: usize,
        eval: &Evaluator<'_>,
        initial_gnorm: f64,
        g: &[f64],
        f: f64,
        x: Vec<f64>,
        cfg: &SolverConfig,
    ) -> RunReport {
        RunReport {
            status,
            iterations,
            f_evals: eval.f_evals,
            g_evals: eval.g_evals,
            ls_extra_trials: self.ls_extra,
            initial_gnorm,
            final_gnorm: norm(g),
            final_f: Some(f),
            x,
            wall_time: self.start.elapsed().as_secs_f64(),
            fallbacks: self.fallbacks,
            trace: self.trace,
            config: cfg.clone(),
        }
    }
}

fn reuse(prev: Option<(f64, StepKind)>) -> Result<Choice, StepsizeError> {
    prev.map(|(a, k)| Choice::new(a, k)).ok_or(StepsizeError::EmptyHistory)
}

fn stored_sd(hist: &StepHistory, i: usize) -> Result<(f64, Vec<f64>), StepsizeError> {
    let r = hist.back(i).ok_or(StepsizeError::EmptyHistory)?;
    Ok((r.sd.ok_or(StepsizeError::EmptyHistory)?, r.g.clone()))
}

/// BB-family trial step from the secant pairs in `hist`; curvature failures
/// yield `alpha_max`.
fn bb_family_step(strategy: Strategy, hist: &StepHistory, cfg: &SolverConfig) -> Choice {
    let pairs = hist.secant_pairs();
    let Some(last) = pairs.last() else {
        return Choice::new(cfg.alpha_max, StepKind::BB1);
    };
    let b1 = bb1_pair(last).unwrap_or(cfg.alpha_max);
    let b2 = bb2_pair(last).unwrap_or(cfg.alpha_max);
    match strategy {
        Strategy::BB1 => Choice::new(b1, StepKind::BB1),
        Strategy::BB2 => Choice::new(b2, StepKind::BB2),
        Strategy::ABBmin => {
            let a = abbmin(&pairs, cfg.tau1, cfg.bb_memory, cfg.alpha_max).unwrap_or(b1);
            let kind = if b2 / b1 < cfg.tau1 { StepKind::BB2 } else { StepKind::BB1 };
            Choice::new(a, kind)
        }
        Strategy::MPSG => Choice::new(mpsg(&pairs, cfg.tau2, cfg.bb_memory).unwrap_or(b1), StepKind::Multipoint),
        _ => unreachable!("not a BB-family strategy"),
    }
}

/// `sd` is the exact Cauchy step `gᵀg / gᵀHg` at the current iterate.
fn quadratic_choice(
    strategy: Strategy,
    cfg: &SolverConfig,
    k: usize,
    hist: &mut StepHistory,
    g: &[f64],
    sd: f64,
    prev: Option<(f64, StepKind)>,
) -> Result<Choice, StepsizeError> {
    let cauchy = |hist: &mut StepHistory| -> Result<f64, StepsizeError> {
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(StepsizeError::NonPositiveCurvature(1.0 / sd));
        }
        hist.set_sd(sd);
        Ok(sd)
    };
    Ok(match strategy {
        Strategy::SD => Choice::new(cauchy(hist)?, StepKind::SD),
        Strategy::BB1 | Strategy::BB2 | Strategy::ABBmin | Strategy::MPSG => {
            if k == 0 {
                Choice::new(cauchy(hist)?, StepKind::SD)
            } else {
                let mut c = bb_family_step(strategy, hist, cfg);
                c.alpha = cfg.clamp_step(c.alpha);
                c
            }
        }
        Strategy::SDC { h, m } => {
            let slot = k % (h + m);
            if slot < h {
                Choice::new(cauchy(hist)?, StepKind::SD)
            } else if slot == h {
                let sd_k = cauchy(hist)?;
                let (sd_prev, g_prev) = stored_sd(hist, 1)?;
                match yuan_variant(sd_prev, sd_k, norm(g), norm(&g_prev)) {
                    Ok(a) => Choice::new(a, StepKind::YV),
                    Err(_) => Choice { fallback: true, ..Choice::new(sd_k, StepKind::SD) },
                }
            } else {
                reuse(prev)?
            }
        }
        Strategy::SL { variant, t } => match k % t {
            0 | 1 => Choice::new(cauchy(hist)?, StepKind::SD),
            2 => {
                let (sd_a, g_a) = stored_sd(hist, 2)?;
                let (sd_b, g_b) = stored_sd(hist, 1)?;
                let kind = if variant == SlVariant::YV { StepKind::YV } else { StepKind::Fixed };
                match variant.fixed_step(sd_a, sd_b, norm(&g_b), norm(&g_a)) {
                    Ok(a) => Choice::new(a, kind),
                    Err(_) => Choice { fallback: true, ..Choice::new(cauchy(hist)?, StepKind::SD) },
                }
            }
            _ => reuse(prev)?,
        },
        Strategy::NY { t } => match CyclePhase::new(k, t).role() {
            CycleRole::Cauchy => Choice::new(cauchy(hist)?, StepKind::SD),
            CycleRole::ThreeDim => {
                let sd2 = cauchy(hist)?;
                let (sd0, g0) = stored_sd(hist, 2)?;
                let (sd1, g1) = stored_sd(hist, 1)?;
                match ny_step([sd0, sd1, sd2], &g0, &g1, g) {
                    Ok((a, StepKind::NY)) => Choice::new(a, StepKind::NY),
                    Ok((a, kind)) => Choice { fallback: true, ..Choice::new(a, kind) },
                    Err(e) => {
                        log::debug!("NY and Yuan-variant steps unavailable ({e}); using the Cauchy step");
                        Choice { fallback: true, ..Choice::new(sd2, StepKind::SD) }
                    }
                }
            }
            CycleRole::Reuse => reuse(prev)?,
        },
        Strategy::ANY { .. } => unreachable!("ANY runs through the line-search loop"),
    })
}

fn run_quadratic(p: &QuadraticProblem, strategy: Strategy, cfg: &SolverConfig) -> Result<RunReport, SolverError> {
    let mut rec = Recorder::new(cfg);
    let mut eval = Evaluator::new(p);
    let mut x = p.x0().to_vec();
    let (mut f, mut g) = quadratic_value_gradient(&mut eval, p, &x)?;
    let g0n = norm(&g);
    let mut hist = StepHistory::new(cfg.bb_memory);
    let mut prev = None;
    let mut k = 0;
    // g and f advance by g ← g − αHg; `exact` marks values straight from Hx + b.
    let mut exact = true;
    let status = loop {
        let gn = norm(&g);
        if !(gn.is_finite() && f.is_finite()) {
            break Status::NumericalFailure;
        }
        if gn <= cfg.epsilon * g0n {
            if exact {
                break Status::Converged;
            }
            (f, g) = quadratic_value_gradient(&mut eval, p, &x)?;
            exact = true;
            continue;
        }
        if k >= cfg.max_iter {
            break Status::MaxIterations;
        }
        hist.push(k, &x, &g, Some(f), None);
        let hg = p.hessian().apply(&g);
        let gg = dot(&g, &g);
        let ghg = dot(&g, &hg);
        let choice = match quadratic_choice(strategy, cfg, k, &mut hist, &g, gg / ghg, prev) {
            Ok(c) => c,
            Err(e) => {
                log::warn!("{strategy}: stepsize failure at k = {k}: {e}");
                break Status::NumericalFailure;
            }
        };
        rec.fallbacks += choice.fallback as usize;
        hist.set_step(choice.alpha);
        rec.record(IterationTrace {
            k,
            f,
            gnorm: gn,
            alpha: choice.alpha,
            lambda: choice.alpha,
            kind: choice.kind,
            stepsize_f_evals: 0,
            ls_extra: 0,
            f_ref: None,
        });
        let a = choice.alpha;
        axpy(-a, &g, &mut x);
        f += a * (0.5 * a * ghg - gg);
        axpy(-a, &hg, &mut g);
        eval.f_evals += 1;
        eval.g_evals += 1;
        exact = false;
        prev = Some((a, choice.kind));
        k += 1;
    };
    Ok(rec.finish(status, k, &eval, g0n, &g, f, x, cfg))
}

#[allow(clippy::too_many_arguments)]
fn any_choice(
    eval: &mut Evaluator<'_>,
    t: usize,
    cfg: &SolverConfig,
    k: usize,
    hist: &mut StepHistory,
    x: &[f64],
    f: f64,
    g: &[f64],
    beta0: f64,
    prev: Option<(f64, StepKind)>,
) -> Result<Choice, SolverError> {
    let approx_cauchy = |eval: &mut Evaluator<'_>, hist: &mut StepHistory| -> Result<(f64, usize), SolverError> {
        let out = asd(eval, x, f, g, beta0, cfg.asd_max_refine, cfg.alpha_min, cfg.alpha_max)
            .map_err(|e| StepsizeError::NumericalFailure(e.to_string()))?;
        if out.degenerate {
            log::debug!("approximate Cauchy step degenerate at k = {k}");
        }
        hist.set_sd(out.alpha);
        Ok((out.alpha, out.f_evals))
    };
    Ok(match CyclePhase::new(k, t).role() {
        CycleRole::Cauchy => {
            let (a, fe) = approx_cauchy(eval, hist)?;
            Choice { stepsize_f_evals: fe, ..Choice::new(a, StepKind::ASD) }
        }
        CycleRole::ThreeDim => {
            let (sd2, fe) = approx_cauchy(eval, hist)?;
            let (sd0, g0) = stored_sd(hist, 2)?;
            let (sd1, g1) = stored_sd(hist, 1)?;
            let mut c = match ny_step([sd0, sd1, sd2], &g0, &g1, g) {
                Ok((a, StepKind::NY)) => Choice::new(a, StepKind::ANY),
                Ok((a, kind)) => Choice { fallback: true, ..Choice::new(a, kind) },
                Err(e) => {
                    log::debug!("ANY and Yuan-variant steps unavailable ({e}); using the approximate Cauchy step");
                    Choice { fallback: true, ..Choice::new(sd2, StepKind::ASD) }
                }
            };
            c.stepsize_f_evals = fe;
            c
        }
        CycleRole::Reuse => reuse(prev)?,
    })
}

fn run_general(obj: &dyn Objective, strategy: Strategy, cfg: &SolverConfig) -> Result<RunReport, SolverError> {
    let mut rec = Recorder::new(cfg);
    let mut eval = Evaluator::new(obj);
    let mut x = obj.x0();
    if x.len() != obj.dim() {
        return Err(ModelError::DimensionMismatch { expected: obj.dim(), got: x.len() }.into());
    }
    let (mut f, mut g) = eval.value_gradient(&x);
    let g0n = norm(&g);
    let mut mem = NonmonotoneMemory::with_initial(cfg.memory, f);
    let mut hist = StepHistory::new(cfg.bb_memory);
    let mut prev = None;
    let mut beta0 = 1.0;
    let mut k = 0;
    let status = loop {
        let gn = norm(&g);
        if !(gn.is_finite() && f.is_finite()) {
            break Status::NumericalFailure;
        }
        if gn <= cfg.epsilon * g0n {
            break Status::Converged;
        }
        if k >= cfg.max_iter {
            break Status::MaxIterations;
        }
        hist.push(k, &x, &g, Some(f), None);
        let choice = match strategy {
            Strategy::ANY { t } => any_choice(&mut eval, t, cfg, k, &mut hist, &x, f, &g, beta0, prev),
            _ if k == 0 => {
                let ginf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                Ok(Choice::new(1.0 / ginf, StepKind::Fixed))
            }
            _ => Ok(bb_family_step(strategy, &hist, cfg)),
        };
        let choice = match choice {
            Ok(c) => c,
            Err(e) => {
                log::warn!("{strategy}: stepsize failure at k = {k}: {e}");
                break Status::NumericalFailure;
            }
        };
        rec.fallbacks += choice.fallback as usize;
        let alpha = cfg.clamp_step(choice.alpha);
        let ls = match strategy {
            Strategy::ANY { .. } => improved_gll(&mut eval, &x, f, &g, &mem, alpha, cfg.delta, cfg.max_ls),
            _ => gll_backtrack(&mut eval, &x, &g, &mem, alpha, cfg.delta, cfg.rho, cfg.max_ls),
        };
        let ls = match ls {
            Ok(ls) => ls,
            Err(LineSearchError::Exhausted { trials, .. }) => {
                rec.ls_extra += trials.saturating_sub(1);
                break Status::LineSearchFailure;
            }
            Err(e) => {
                log::warn!("{strategy}: line search rejected its input at k = {k}: {e}");
                break Status::NumericalFailure;
            }
        };
        hist.set_step(ls.lambda);
        rec.record(IterationTrace {
            k,
            f,
            gnorm: gn,
            alpha,
            lambda: ls.lambda,
            kind: choice.kind,
            stepsize_f_evals: choice.stepsize_f_evals,
            ls_extra: ls.extra_trials,
            f_ref: Some(ls.f_ref),
        });
        x = ls.x_new;
        f = ls.f_new;
        g = eval.gradient(&x);
        mem.push(f);
        prev = Some((alpha, choice.kind));
        beta0 = ls.lambda;
        k += 1;
    };
    Ok(rec.finish(status, k, &eval, g0n, &g, f, x, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Hessian;
    use crate::problems::{engval1, make_problem_3, random_diagonal_quadratic, random_spd_quadratic};
    use crate::stepsize::cauchy_exact;
    use approx::assert_relative_eq;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn diag(l: &[f64], b: &[f64], x0: &[f64]) -> QuadraticProblem {
        QuadraticProblem::diagonal(l.to_vec(), b.to_vec(), x0.to_vec()).unwrap()
    }

    fn traced(eps: f64, t: usize) -> SolverConfig {
        SolverConfig { epsilon: eps, cycle_len: t, ..SolverConfig::default() }.with_trace()
    }

    #[test]
    fn cycle_phase_roles() {
        let roles: Vec<_> = (0..8).map(|k| CyclePhase::new(k, 4).role()).collect();
        use CycleRole::*;
        assert_eq!(roles, vec![Cauchy, Cauchy, ThreeDim, Reuse, Cauchy, Cauchy, ThreeDim, Reuse]);
    }

    #[test]
    fn strategy_names_round_trip() {
        let cfg = SolverConfig::default();
        for name in ["sd", "bb1", "bb2", "abbmin", "mpsg", "sdc", "sl-yv", "sl-hm", "sl-fmin", "sl-fmax", "ny", "any"] {
            assert_eq!(Strategy::from_name(name, &cfg).unwrap().name(), name);
        }
        assert!(Strategy::from_name("cg", &cfg).is_none());
    }

    #[test]
    fn five_step_reaches_known_minimiser() {
        let p = diag(&[1.0, 2.0, 5.0], &[-1.0, -2.0, -5.0], &[0.0; 3]);
        let out = five_step_3d(&p).unwrap();
        assert_eq!(out.path, FiveStepPath::Ny);
        assert_eq!(out.steps.len(), 5);
        assert_eq!(out.gnorms.len(), 6);
        assert!(*out.gnorms.last().unwrap() <= 1e-10, "{:?}", out.gnorms);
        for xi in &out.x_star {
            assert_relative_eq!(*xi, 1.0, max_relative = 1e-10);
        }
        // NY(1) ≤ NY(2) and both are reciprocal eigenvalues
        assert_relative_eq!(out.steps[2], 0.2, max_relative = 1e-10);
        assert!(out.steps[2] <= out.steps[3]);
    }

    #[test]
    fn five_step_at_minimiser_stops_immediately() {
        let p = diag(&[1.0, 2.0, 5.0], &[-1.0, -2.0, -5.0], &[1.0; 3]);
        let out = five_step_3d(&p).unwrap();
        assert_eq!(out.gnorms, vec![0.0]);
        assert!(out.steps.is_empty());
        assert_eq!(out.x_star, vec![1.0; 3]);
    }

    #[test]
    fn five_step_falls_back_in_an_eigenplane() {
        let p = diag(&[1.0, 4.0, 9.0], &[0.0; 3], &[1.0, 0.0, 1.0]);
        let out = five_step_3d(&p).unwrap();
        assert_eq!(out.path, FiveStepPath::Yuan);
        assert_eq!(out.steps.len(), 3);
        assert!(*out.gnorms.last().unwrap() <= 1e-12 * out.gnorms[0], "{:?}", out.gnorms);
        assert!(out.x_star.iter().all(|v| v.abs() <= 1e-12));
        assert!(five_step_3d(&diag(&[1.0, 2.0], &[0.0; 2], &[1.0; 2])).is_err());
    }

    #[test]
    fn ny_terminates_on_small_diagonal() {
        let p = diag(&[1.0, 2.0, 5.0], &[0.0; 3], &[1.0; 3]);
        let r = solve_ny(&p, &traced(1e-8, 3)).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!(r.iterations <= 7, "{}", r.iterations);
        // one per step, the initial gradient and the exact recheck at convergence
        assert_eq!(r.g_evals, r.iterations + 2);
    }

    #[test]
    fn one_dimensional_problems_take_one_step() {
        let p = diag(&[3.0], &[-6.0], &[0.0]);
        for s in [Strategy::SD, Strategy::NY { t: 3 }] {
            let r = solve_strategy(Target::Quadratic(&p), s, &SolverConfig::default()).unwrap();
            assert_eq!((r.status, r.iterations), (Status::Converged, 1));
            assert_relative_eq!(r.x[0], 2.0);
        }
    }

    #[test]
    fn zero_gradient_start_converges_immediately() {
        let p = diag(&[3.0, 1.0], &[0.0; 2], &[0.0; 2]);
        let r = solve_ny(&p, &SolverConfig::default()).unwrap();
        assert_eq!((r.status, r.iterations), (Status::Converged, 0));
        let r = solve_any(&p, &SolverConfig::default()).unwrap();
        assert_eq!((r.status, r.iterations), (Status::Converged, 0));
    }

    #[test]
    fn max_iterations_is_reported() {
        let p = make_problem_3(200, 1e6, 0).unwrap();
        let cfg = SolverConfig { max_iter: 1, ..SolverConfig::default() };
        let r = solve_ny(&p, &cfg).unwrap();
        assert_eq!((r.status, r.iterations), (Status::MaxIterations, 1));
        let obj = engval1(100).unwrap();
        let r = solve_any(&obj, &cfg).unwrap();
        assert_eq!((r.status, r.iterations), (Status::MaxIterations, 1));
    }

    #[test]
    fn quadratic_only_strategies_reject_general_objectives() {
        let obj = engval1(10).unwrap();
        let cfg = SolverConfig::default();
        for s in [Strategy::SD, Strategy::NY { t: 7 }, Strategy::SDC { h: 2, m: 4 }, Strategy::SL { variant: SlVariant::YV, t: 7 }] {
            assert!(matches!(solve_strategy(Target::General(&obj), s, &cfg), Err(SolverError::RequiresQuadratic(_))));
        }
        assert!(solve_strategy(Target::General(&obj), Strategy::NY { t: 2 }, &cfg).is_err());
    }

    #[test]
    fn ny_run_on_problem3_shape_respects_bounds() {
        let p = make_problem_3(100, 1e4, 1).unwrap();
        let r = solve_ny(&p, &traced(1e-6, 7)).unwrap();
        assert_eq!(r.status, Status::Converged);
        let Hessian::Diagonal(l) = p.hessian() else { panic!() };
        let l1 = l.iter().copied().fold(0.0, f64::max);
        let ln = l.iter().copied().fold(f64::INFINITY, f64::min);
        let m1 = l1 + ((l1 - ln) * (3.0 * l1 + ln) / 6.0).sqrt();
        for t in r.trace.unwrap() {
            let inv = 1.0 / t.alpha;
            assert!(inv >= ln * (1.0 - 1e-12) && inv <= m1, "k = {}: {inv}", t.k);
        }
    }

    #[test]
    fn any_mirrors_ny_on_quadratics() {
        let p = random_spd_quadratic(3, 50.0, 5);
        let cfg = traced(1e-8, 4);
        let ny = solve_ny(&p, &cfg).unwrap();
        let any = solve_any(&p, &cfg).unwrap();
        assert_eq!(any.status, Status::Converged);
        let ny_t = ny.trace.unwrap();
        let any_t = any.trace.unwrap();
        let expect = |k: StepKind| match k {
            StepKind::SD => StepKind::ASD,
            StepKind::NY => StepKind::ANY,
            other => other,
        };
        for (a, b) in ny_t.iter().zip(&any_t) {
            assert_eq!(expect(a.kind), b.kind);
            assert_relative_eq!(a.alpha, b.alpha, max_relative = 1e-6);
        }
    }

    #[test]
    fn bb1_equals_previous_cauchy_step() {
        let p = random_spd_quadratic(6, 30.0, 2);
        let r = solve_strategy(Target::Quadratic(&p), Strategy::BB1, &traced(1e-8, 7)).unwrap();
        assert_eq!(r.status, Status::Converged);
        let trace = r.trace.unwrap();
        // replay the iterates independently
        let mut x = p.x0().to_vec();
        let mut prev_cauchy = None;
        for t in &trace {
            let (_, g) = p.value_gradient(&x).unwrap();
            if let Some(c) = prev_cauchy {
                // the solver's gradients are propagated, not recomputed
                assert_relative_eq!(t.alpha, c, max_relative = 1e-6);
            }
            prev_cauchy = Some(cauchy_exact(&g, p.hessian()).unwrap());
            axpy(-t.alpha, &g, &mut x);
        }
    }

    #[test]
    fn cyclic_comparators_on_a_plane() {
        let p = diag(&[1.0, 20.0], &[1.0, -3.0], &[2.0, 2.0]);
        let cfg = traced(1e-10, 7);
        let sl = solve_strategy(Target::Quadratic(&p), Strategy::SL { variant: SlVariant::YV, t: 7 }, &cfg).unwrap();
        assert_eq!(sl.status, Status::Converged);
        let t = sl.trace.unwrap();
        let (_, g0) = p.value_gradient(p.x0()).unwrap();
        let sd0 = cauchy_exact(&g0, p.hessian()).unwrap();
        let mut x1 = p.x0().to_vec();
        axpy(-sd0, &g0, &mut x1);
        let (_, g1) = p.value_gradient(&x1).unwrap();
        let sd1 = cauchy_exact(&g1, p.hessian()).unwrap();
        assert_eq!(t[2].kind, StepKind::YV);
        assert_relative_eq!(t[2].alpha, yuan_variant(sd0, sd1, norm(&g1), norm(&g0)).unwrap(), max_relative = 1e-12);

        let sdc = solve_strategy(Target::Quadratic(&p), Strategy::SDC { h: 2, m: 4 }, &cfg).unwrap();
        assert_eq!(sdc.status, Status::Converged);
        for v in [SlVariant::HarmonicMean, SlVariant::Fmin, SlVariant::Fmax] {
            let r = solve_strategy(Target::Quadratic(&p), Strategy::SL { variant: v, t: 5 }, &cfg).unwrap();
            assert_eq!(r.status, Status::Converged, "{v:?}");
        }
    }

    #[test]
    fn bb_family_converges_on_quadratics_and_engval1() {
        let p = random_spd_quadratic(40, 100.0, 9);
        let obj = engval1(50).unwrap();
        for s in [Strategy::BB1, Strategy::BB2, Strategy::ABBmin, Strategy::MPSG] {
            let r = solve_strategy(Target::Quadratic(&p), s, &SolverConfig::default()).unwrap();
            assert_eq!(r.status, Status::Converged, "{s} on quadratic");
            let r = solve_strategy(Target::General(&obj), s, &SolverConfig::default()).unwrap();
            assert_eq!(r.status, Status::Converged, "{s} on engval1");
        }
    }

    #[test]
    fn any_counts_evaluations_and_respects_the_clamp() {
        let obj = engval1(200).unwrap();
        let cfg = SolverConfig { alpha_max: 0.05, ..SolverConfig::default() }.with_trace();
        let r = solve_any(&obj, &cfg).unwrap();
        assert_eq!(r.status, Status::Converged);
        let trace = r.trace.as_ref().unwrap();
        let stepsize: usize = trace.iter().map(|t| t.stepsize_f_evals).sum();
        let ls: usize = trace.iter().map(|t| t.ls_extra + 1).sum();
        assert_eq!(r.f_evals, 1 + stepsize + ls);
        assert_eq!(r.g_evals, 1 + r.iterations);
        assert_eq!(r.ls_extra_trials, trace.iter().map(|t| t.ls_extra).sum::<usize>());
        for t in trace {
            assert!(t.alpha >= cfg.alpha_min && t.alpha <= cfg.alpha_max);
            assert!(t.lambda <= t.alpha);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reuse_slots_repeat_the_three_dimensional_step(seed in 0u64..10_000, t in 3usize..9, n in 3usize..30) {
            let p = random_spd_quadratic(n, 1e3, seed);
            let r = solve_ny(&p, &traced(1e-10, t)).unwrap();
            let tr = r.trace.unwrap();
            for e in &tr {
                let slot = e.k % t;
                if slot > 2 {
                    let base = &tr[e.k - (slot - 2)];
                    prop_assert_eq!(e.alpha.to_bits(), base.alpha.to_bits());
                    prop_assert_eq!(e.kind, base.kind);
                } else if slot < 2 {
                    prop_assert_eq!(e.kind, StepKind::SD);
                }
            }
        }

        #[test]
        fn ny_terminates_in_two_cycles_plus_one(seed in 0u64..100_000, t in 3usize..8, lk in 0.0f64..2.0) {
            let p = random_diagonal_quadratic(3, 10f64.powf(lk), seed);
            let r = solve_ny(&p, &SolverConfig { epsilon: 1e-8, cycle_len: t, ..SolverConfig::default() }).unwrap();
            prop_assert_eq!(r.status, Status::Converged);
            prop_assert!(r.iterations <= 2 * t + 1, "{} iterations with T = {}", r.iterations, t);
        }
    }
}
