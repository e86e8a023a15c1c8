//! Problem abstractions, solver configuration and per-run bookkeeping.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVectorView, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::dot;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("hessian is not symmetric (|H_ij - H_ji| = {0:e})")]
    NotSymmetric(f64),
    #[error("hessian is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

/// Symmetric positive-definite operator of a quadratic model.
///
/// Large problems are kept as a diagonal spectrum; the dense form is meant for
/// small test matrices (n up to a thousand).
#[derive(Debug, Clone, PartialEq)]
pub enum Hessian {
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

impl Hessian {
    pub fn dim(&self) -> usize {
        match self {
            Hessian::Diagonal(d) => d.len(),
            Hessian::Dense(m) => m.nrows(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Hessian::Diagonal(d) => d.iter().zip(x).map(|(l, v)| l * v).collect(),
            Hessian::Dense(m) => {
                let v = DVectorView::from_slice(x, x.len());
                (m * v).data.into()
            }
        }
    }

    /// `xᵀ H x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        match self {
            Hessian::Diagonal(d) => d.iter().zip(x).map(|(l, v)| l * v * v).sum(),
            Hessian::Dense(_) => dot(x, &self.apply(x)),
        }
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = match self {
            Hessian::Diagonal(d) => d.clone(),
            Hessian::Dense(m) => SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect(),
        };
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// `f(x) = ½ xᵀHx + bᵀx` together with a starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    hessian: Hessian,
    b: Vec<f64>,
    x0: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(hessian: Hessian, b: Vec<f64>, x0: Vec<f64>) -> Result<Self, ModelError> {
        let n = hessian.dim();
        for v in [&b, &x0] {
            if v.len() != n {
                return Err(ModelError::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        match &hessian {
            Hessian::Diagonal(d) => {
                if let Some(min) = d.iter().copied().reduce(f64::min) {
                    if !(min > 0.0) {
                        return Err(ModelError::NotPositiveDefinite(min));
                    }
                }
            }
            Hessian::Dense(m) => {
                if m.ncols() != n {
                    return Err(ModelError::DimensionMismatch { expected: n, got: m.ncols() });
                }
                let mut asym = 0.0f64;
                for i in 0..n {
                    for j in 0..i {
                        asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
                    }
                }
                if asym != 0.0 {
                    return Err(ModelError::NotSymmetric(asym));
                }
                if n <= 50 {
                    let min = SymmetricEigen::new(m.clone())
                        .eigenvalues
                        .iter()
                        .copied()
                        .fold(f64::INFINITY, f64::min);
                    if !(min > 0.0) {
                        return Err(ModelError::NotPositiveDefinite(min));
                    }
                } else if m.clone().cholesky().is_none() {
                    return Err(ModelError::NotPositiveDefinite(f64::NAN));
                }
            }
        }
        Ok(Self { hessian, b, x0 })
    }

    pub fn diagonal(lambda: Vec<f64>, b: Vec<f64>, x0: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(Hessian::Diagonal(lambda), b, x0)
    }

    pub fn dim(&self) -> usize {
        self.hessian.dim()
    }

    pub fn hessian(&self) -> &Hessian {
        &self.hessian
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    /// Replaces the starting point.
    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self, ModelError> {
        if x0.len() != self.dim() {
            return Err(ModelError::DimensionMismatch { expected: self.dim(), got: x0.len() });
        }
        self.x0 = x0;
        Ok(self)
    }

    /// Condition number `λ_max / λ_min`.
    pub fn kappa(&self) -> f64 {
        let ev = self.hessian.eigenvalues();
        ev[0] / ev[ev.len() - 1]
    }

    /// Value and gradient at `x`: `g = Hx + b`, `f = ½ xᵀ(g + b)`.
    pub fn value_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>), ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut g = self.hessian.apply(x);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi += bi;
        }
        let f = 0.5 * x.iter().zip(g.iter().zip(&self.b)).map(|(xi, (gi, bi))| xi * (gi + bi)).sum::<f64>();
        (f, g)
    }

    /// Closed-form `gᵀg / gᵀHg`.
    pub fn cauchy_step(&self, g: &[f64]) -> Result<f64, crate::stepsize::StepsizeError> {
        crate::stepsize::cauchy_exact(g, &self.hessian)
    }
}

/// Convenience for the quadratic evaluation that also bumps `eval`'s counters.
pub fn quadratic_value_gradient(
    eval: &mut Evaluator<'_>,
    p: &QuadraticProblem,
    x: &[f64],
) -> Result<(f64, Vec<f64>), ModelError> {
    let out = p.value_gradient(x)?;
    eval.f_evals += 1;
    eval.g_evals += 1;
    Ok(out)
}

/// A smooth objective `f: ℝⁿ → ℝ` with an analytic gradient.
///
/// Implementations are immutable; evaluation counts live in [`Evaluator`].
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn value_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value(x), self.gradient(x))
    }
    fn x0(&self) -> Vec<f64>;
    fn name(&self) -> &str {
        "objective"
    }
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        QuadraticProblem::dim(self)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x).0
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval_unchecked(x).1
    }
    fn value_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.eval_unchecked(x)
    }
    fn x0(&self) -> Vec<f64> {
        self.x0.clone()
    }
    fn name(&self) -> &str {
        "quadratic"
    }
}

/// Per-run evaluation counter wrapped around a shared objective.
pub struct Evaluator<'a> {
    obj: &'a dyn Objective,
    pub f_evals: usize,
    pub g_evals: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(obj: &'a dyn Objective) -> Self {
        Self { obj, f_evals: 0, g_evals: 0 }
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.obj
    }

    pub fn dim(&self) -> usize {
        self.obj.dim()
    }

    pub fn value(&mut self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.obj.dim());
        self.f_evals += 1;
        self.obj.value(x)
    }

    pub fn gradient(&mut self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.obj.dim());
        self.g_evals += 1;
        self.obj.gradient(x)
    }

    pub fn value_gradient(&mut self, x: &[f64]) -> (f64, Vec<f64>) {
        debug_assert_eq!(x.len(), self.obj.dim());
        self.f_evals += 1;
        self.g_evals += 1;
        self.obj.value_gradient(x)
    }
}

/// Largest coordinate-wise relative error between the analytic gradient and a
/// central difference with step `h`: `|cd − g_i| / max(1, |g_i|)`.
pub fn gradient_check(obj: &dyn Objective, x: &[f64], h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let g = obj.gradient(x);
    let mut xp = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = obj.value(&xp);
        xp[i] = xi - h;
        let fm = obj.value(&xp);
        xp[i] = xi;
        let cd = (fp - fm) / (2.0 * h);
        worst = worst.max((cd - g[i]).abs() / g[i].abs().max(1.0));
    }
    worst
}

/// Tunables of every solver in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Cycle length `T` of the cyclic strategies.
    pub cycle_len: usize,
    /// Relative gradient tolerance: stop once `‖g_k‖ ≤ ε‖g_0‖`.
    pub epsilon: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Nonmonotone memory length `M`.
    pub memory: usize,
    /// Sufficient-decrease parameter.
    pub delta: f64,
    /// Maximum line-search trials per iteration.
    pub max_ls: usize,
    pub max_iter: usize,
    /// ABBmin switching threshold.
    pub tau1: f64,
    /// MPSG switching threshold.
    pub tau2: f64,
    /// Secant-pair window for ABBmin / MPSG.
    pub bb_memory: usize,
    /// Backtracking factor of the fixed-factor GLL search.
    pub rho: f64,
    /// Resampling budget of the approximate Cauchy step.
    pub asd_max_refine: usize,
    /// SDC: number of Cauchy steps per cycle.
    pub sdc_h: usize,
    /// SDC: number of reuses of the Yuan step per cycle.
    pub sdc_m: usize,
    pub seed: u64,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cycle_len: 7,
            epsilon: 1e-6,
            alpha_min: 1e-10,
            alpha_max: 1e5,
            memory: 10,
            delta: 1e-4,
            max_ls: 30,
            max_iter: 20_000,
            tau1: 0.8,
            tau2: 0.9,
            bb_memory: 5,
            rho: 0.5,
            asd_max_refine: 2,
            sdc_h: 2,
            sdc_m: 4,
            seed: 0,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidConfig(msg.to_string()));
        if self.cycle_len < 3 {
            return bad("cycle length T must be at least 3");
        }
        if !(self.alpha_min > 0.0 && self.alpha_min < self.alpha_max) {
            return bad("need 0 < alpha_min < alpha_max");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if self.max_ls < 1 {
            return bad("L_max must be at least 1");
        }
        if !(self.tau1 > 0.0 && self.tau1 < 1.0) || !(self.tau2 > 0.0 && self.tau2 < 1.0) {
            return bad("tau1 and tau2 must lie in (0, 1)");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0, 1)");
        }
        if self.bb_memory < 1 {
            return bad("bb_memory must be at least 1");
        }
        if self.sdc_h < 2 {
            return bad("SDC needs h >= 2");
        }
        Ok(())
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn clamp_step(&self, alpha: f64) -> f64 {
        alpha.min(self.alpha_max).max(self.alpha_min)
    }
}

/// Curvature information of one secant pair `(s, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecantPair {
    pub ss: f64,
    pub sy: f64,
    pub yy: f64,
}

impl SecantPair {
    pub fn from_vectors(s: &[f64], y: &[f64]) -> Self {
        Self { ss: dot(s, s), sy: dot(s, y), yy: dot(y, y) }
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub f: Option<f64>,
    /// Exact or approximated Cauchy stepsize computed at this iterate, if any.
    pub sd: Option<f64>,
    /// Stepsize accepted at this iterate, filled in once the step is taken.
    pub step: Option<f64>,
    /// `s_{k-1} = x_k − x_{k-1}` and `y_{k-1} = g_k − g_{k-1}`.
    pub s: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub pair: Option<SecantPair>,
}

/// Rolling window of recent iterates and their stepsizes.
#[derive(Debug, Clone)]
pub struct StepHistory {
    capacity: usize,
    records: VecDeque<StepRecord>,
}

impl StepHistory {
    /// Capacity is at least 3 and at least `bb_memory + 2` (so that `bb_memory + 1`
    /// secant pairs are retained).
    pub fn new(bb_memory: usize) -> Self {
        let capacity = 3usize.max(bb_memory + 2);
        Self { capacity, records: VecDeque::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends iterate `k`. Panics if `k` does not exceed the last stored index.
    pub fn push(&mut self, k: usize, x: &[f64], g: &[f64], f: Option<f64>, sd: Option<f64>) {
        let (s, y, pair) = match self.records.back() {
            Some(prev) => {
                assert!(k > prev.k, "history indices must increase");
                let s = crate::linalg::sub(x, &prev.x);
                let y = crate::linalg::sub(g, &prev.g);
                let pair = SecantPair::from_vectors(&s, &y);
                (Some(s), Some(y), Some(pair))
            }
            None => (None, None, None),
        };
        if self.records.len() == self.capacity {
            self.records.pop_front();
        }
        self.records.push_back(StepRecord { k, x: x.to_vec(), g: g.to_vec(), f, sd, step: None, s, y, pair });
    }

    pub fn set_step(&mut self, step: f64) {
        if let Some(r) = self.records.back_mut() {
            r.step = Some(step);
        }
    }

    pub fn set_sd(&mut self, sd: f64) {
        if let Some(r) = self.records.back_mut() {
            r.sd = Some(sd);
        }
    }

    /// `back(0)` is the latest record.
    pub fn back(&self, i: usize) -> Option<&StepRecord> {
        self.records.len().checked_sub(i + 1).and_then(|j| self.records.get(j))
    }

    pub fn records(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter()
    }

    /// Secant pairs, oldest first.
    pub fn secant_pairs(&self) -> Vec<SecantPair> {
        self.records.iter().filter_map(|r| r.pair).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIterations,
    LineSearchFailure,
    NumericalFailure,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIterations => "MaxIterations",
            Status::LineSearchFailure => "LineSearchFailure",
            Status::NumericalFailure => "NumericalFailure",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    SD,
    ASD,
    NY,
    ANY,
    BB1,
    BB2,
    /// Multipoint BB-type step.
    Multipoint,
    Fixed,
    Yuan,
    YV,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub k: usize,
    /// Objective value at `x_k` (NaN when the solver never evaluates `f`).
    pub f: f64,
    pub gnorm: f64,
    /// Trial stepsize chosen by the strategy (after clamping, before line search).
    pub alpha: f64,
    /// Accepted stepsize.
    pub lambda: f64,
    pub kind: StepKind,
    /// Function evaluations spent computing the trial stepsize itself.
    pub stepsize_f_evals: usize,
    /// Extra line-search trials at this iteration.
    pub ls_extra: usize,
    /// Nonmonotone reference value the step was accepted against.
    pub f_ref: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub status: Status,
    pub iterations: usize,
    pub f_evals: usize,
    pub g_evals: usize,
    pub ls_extra_trials: usize,
    pub initial_gnorm: f64,
    pub final_gnorm: f64,
    pub final_f: Option<f64>,
    pub x: Vec<f64>,
    pub wall_time: f64,
    /// Number of times a NY/ANY stepsize could not be formed and a fallback was used.
    pub fallbacks: usize,
    pub trace: Option<Vec<IterationTrace>>,
    pub config: SolverConfig,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag(l: &[f64], b: &[f64]) -> QuadraticProblem {
        QuadraticProblem::diagonal(l.to_vec(), b.to_vec(), vec![0.0; l.len()]).unwrap()
    }

    #[test]
    fn quadratic_examples() {
        let p = diag(&[1.0, 1.0], &[0.0, 0.0]);
        let (f, g) = p.value_gradient(&[0.0, 0.0]).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(g, vec![0.0, 0.0]);

        let p = diag(&[1.0, 2.0], &[1.0, 0.0]);
        let (f, g) = p.value_gradient(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(f, 2.5, epsilon = 1e-15);
        assert_eq!(g, vec![2.0, 2.0]);
        // finite differences of f agree with g
        let h = 1e-6;
        let fd0 = (p.value(&[1.0 + h, 1.0]) - p.value(&[1.0 - h, 1.0])) / (2.0 * h);
        let fd1 = (p.value(&[1.0, 1.0 + h]) - p.value(&[1.0, 1.0 - h])) / (2.0 * h);
        assert_relative_eq!(fd0, 2.0, epsilon = 1e-8);
        assert_relative_eq!(fd1, 2.0, epsilon = 1e-8);

        let p = diag(&[1.0, 1.0, 1.0], &[0.0; 3]);
        let (f, g) = p.value_gradient(&[3.0, 4.0, 0.0]).unwrap();
        assert_relative_eq!(f, 12.5);
        assert_eq!(g, vec![3.0, 4.0, 0.0]);
    }

    #[test]
    fn dense_and_diagonal_agree() {
        let d = vec![1.0, 2.0, 3.0];
        let dense = Hessian::Dense(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone())));
        let pd = QuadraticProblem::new(dense, vec![1.0, -1.0, 0.5], vec![0.0; 3]).unwrap();
        let pq = QuadraticProblem::diagonal(d, vec![1.0, -1.0, 0.5], vec![0.0; 3]).unwrap();
        let x = [0.3, -0.7, 2.0];
        assert_eq!(pd.value_gradient(&x).unwrap(), pq.value_gradient(&x).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = diag(&[1.0, 2.0], &[0.0, 0.0]);
        assert!(matches!(
            p.value_gradient(&[1.0]),
            Err(ModelError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(QuadraticProblem::diagonal(vec![1.0], vec![0.0, 0.0], vec![0.0]).is_err());
    }

    #[test]
    fn rejects_non_spd() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            QuadraticProblem::new(Hessian::Dense(m), vec![0.0; 2], vec![0.0; 2]),
            Err(ModelError::NotSymmetric(_))
        ));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            QuadraticProblem::new(Hessian::Dense(m), vec![0.0; 2], vec![0.0; 2]),
            Err(ModelError::NotPositiveDefinite(_))
        ));
        assert!(QuadraticProblem::diagonal(vec![1.0, 0.0], vec![0.0; 2], vec![0.0; 2]).is_err());
    }

    #[test]
    fn gradient_check_on_quadratic() {
        let p = diag(&[1.0, 2.0, 3.0], &[0.0; 3]);
        assert!(gradient_check(&p, &[1.0, 1.0, 1.0], 1e-5) <= 1e-8);
    }

    #[test]
    fn evaluator_counts_exactly() {
        let p = diag(&[1.0, 2.0], &[0.0; 2]);
        let mut ev = Evaluator::new(&p);
        ev.value(&[1.0, 1.0]);
        ev.gradient(&[1.0, 1.0]);
        ev.value_gradient(&[1.0, 1.0]);
        quadratic_value_gradient(&mut ev, &p, &[0.0, 0.0]).unwrap();
        assert_eq!((ev.f_evals, ev.g_evals), (3, 3));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let mut c = SolverConfig::default();
        c.cycle_len = 2;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::default();
        c.alpha_min = 1.0;
        c.alpha_max = 0.5;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::default();
        c.delta = 1.0;
        assert!(c.validate().is_err());
        assert_eq!(SolverConfig::default().clamp_step(1e9), 1e5);
        assert_eq!(SolverConfig::default().clamp_step(0.0), 1e-10);
    }

    #[test]
    fn history_pairs_are_consistent() {
        let mut h = StepHistory::new(1);
        assert_eq!(h.capacity(), 3);
        let xs = [[0.0, 0.0], [1.0, 0.5], [1.5, 2.0], [3.0, 1.0]];
        let gs = [[1.0, 1.0], [2.0, 0.0], [0.5, 0.5], [0.0, 1.0]];
        for k in 0..4 {
            h.push(k, &xs[k], &gs[k], None, None);
        }
        assert_eq!(h.len(), 3);
        let ks: Vec<usize> = h.records().map(|r| r.k).collect();
        assert_eq!(ks, vec![1, 2, 3]);
        for r in h.records() {
            let s = r.s.as_ref().unwrap();
            let expect = crate::linalg::sub(&xs[r.k], &xs[r.k - 1]);
            assert_eq!(crate::linalg::norm(&crate::linalg::sub(s, &expect)), 0.0);
        }
        assert_eq!(h.back(0).unwrap().k, 3);
        assert_eq!(h.back(2).unwrap().k, 1);
        assert!(h.back(3).is_none());
    }

    #[test]
    #[should_panic]
    fn history_rejects_non_increasing_k() {
        let mut h = StepHistory::new(1);
        h.push(1, &[0.0], &[0.0], None, None);
        h.push(1, &[0.0], &[0.0], None, None);
    }
}
