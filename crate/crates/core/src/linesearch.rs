//! Nonmonotone line searches along `−g` and the approximate Cauchy stepsize.
//!
//! Both searches accept a trial `α` once
//! `f(x − αg) ≤ f_ref − δα‖g‖²`, where `f_ref` is the largest of the last
//! `M + 1` objective values. They differ only in how a rejected trial is shrunk.

use std::collections::VecDeque;

use thiserror::Error;

use crate::linalg::{norm_sq, step};
use crate::model::Evaluator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LineSearchError {
    #[error("no acceptable step after {trials} trials (last trial {last_alpha:e})")]
    Exhausted { trials: usize, last_alpha: f64 },
    #[error("invalid line-search input: {0}")]
    InvalidInput(String),
}

/// Ring buffer of the most recent `M + 1` objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct NonmonotoneMemory {
    m: usize,
    values: VecDeque<f64>,
}

impl NonmonotoneMemory {
    pub fn new(m: usize) -> Self {
        Self { m, values: VecDeque::with_capacity(m + 1) }
    }

    pub fn with_initial(m: usize, f0: f64) -> Self {
        let mut mem = Self::new(m);
        mem.push(f0);
        mem
    }

    pub fn push(&mut self, f: f64) {
        if self.values.len() == self.m + 1 {
            self.values.pop_front();
        }
        self.values.push_back(f);
    }

    /// Largest stored value, `−∞` when empty.
    pub fn f_ref(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Most recently pushed value.
    pub fn current(&self) -> Option<f64> {
        self.values.back().copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn memory(&self) -> usize {
        self.m
    }
}

/// Outcome of an accepted line search.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub lambda: f64,
    pub x_new: Vec<f64>,
    pub f_new: f64,
    /// Function evaluations beyond the first trial.
    pub extra_trials: usize,
    pub f_ref: f64,
    /// Every trial stepsize, in order; the last one was accepted.
    pub trials: Vec<f64>,
}

fn check_inputs(x: &[f64], g: &[f64], mem: &NonmonotoneMemory, alpha0: f64, delta: f64) -> Result<f64, LineSearchError> {
    if x.len() != g.len() {
        return Err(LineSearchError::InvalidInput("x and g differ in length".into()));
    }
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(LineSearchError::InvalidInput(format!("alpha0 must be positive, got {alpha0:e}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LineSearchError::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
    }
    if mem.is_empty() {
        return Err(LineSearchError::InvalidInput("nonmonotone memory is empty".into()));
    }
    let gg = norm_sq(g);
    if !(gg > 0.0) {
        return Err(LineSearchError::InvalidInput("zero gradient".into()));
    }
    Ok(gg)
}

fn search(
    eval: &mut Evaluator<'_>,
    x: &[f64],
    g: &[f64],
    mem: &NonmonotoneMemory,
    alpha0: f64,
    delta: f64,
    max_trials: usize,
    mut shrink: impl FnMut(f64, f64) -> f64,
) -> Result<LineSearchOutcome, LineSearchError> {
    let gg = check_inputs(x, g, mem, alpha0, delta)?;
    let f_ref = mem.f_ref();
    let mut alpha = alpha0;
    let mut trials = Vec::new();
    while trials.len() < max_trials {
        trials.push(alpha);
        let x_new = step(x, alpha, g);
        let f_new = eval.value(&x_new);
        if f_new <= f_ref - delta * alpha * gg {
            return Ok(LineSearchOutcome {
                lambda: alpha,
                x_new,
                f_new,
                extra_trials: trials.len() - 1,
                f_ref,
                trials,
            });
        }
        alpha = shrink(alpha, f_new);
    }
    Err(LineSearchError::Exhausted { trials: trials.len(), last_alpha: trials.last().copied().unwrap_or(alpha0) })
}

/// GLL search whose backtracking step is the minimiser of the quadratic through
/// `φ(0) = f`, `φ′(0) = −‖g‖²` and the rejected `φ(α)`, provided it lies in
/// `[0.1α, 0.9α]`; otherwise the trial is halved.
///
/// `f` is `f(x)` and must already be stored in `mem`.
pub fn improved_gll(
    eval: &mut Evaluator<'_>,
    x: &[f64],
    f: f64,
    g: &[f64],
    mem: &NonmonotoneMemory,
    alpha0: f64,
    delta: f64,
    max_trials: usize,
) -> Result<LineSearchOutcome, LineSearchError> {
    let gg = norm_sq(g);
    search(eval, x, g, mem, alpha0, delta, max_trials, |alpha, f_new| {
        let bar = gg * alpha * alpha / (2.0 * (f_new - f + alpha * gg));
        if bar >= 0.1 * alpha && bar <= 0.9 * alpha {
            bar
        } else {
            0.5 * alpha
        }
    })
}

/// GLL search with fixed-factor backtracking `λ = ρᵖ α₀`.
pub fn gll_backtrack(
    eval: &mut Evaluator<'_>,
    x: &[f64],
    g: &[f64],
    mem: &NonmonotoneMemory,
    alpha0: f64,
    delta: f64,
    rho: f64,
    max_trials: usize,
) -> Result<LineSearchOutcome, LineSearchError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(LineSearchError::InvalidInput(format!("rho must lie in (0, 1), got {rho}")));
    }
    search(eval, x, g, mem, alpha0, delta, max_trials, |alpha, _| rho * alpha)
}

/// Approximate Cauchy stepsize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsdOutcome {
    pub alpha: f64,
    pub f_evals: usize,
    /// No sample produced positive curvature; `alpha` is the clamped `β₀`.
    pub degenerate: bool,
}

/// Minimiser of the quadratic interpolating `φ(α) = f(x − αg)` through
/// `φ(0) = f`, `φ′(0) = −‖g‖²` and `φ(β)`.
///
/// Starting from `β = β₀`, a sample whose fit has non-positive curvature or a
/// minimiser beyond `10β` is replaced by a sample at `10β` (at `β/10` when `φ(β)`
/// is not finite), at most `max_refine` times. The fit from the final sample is
/// used whenever its curvature is positive. The result is clamped to
/// `[alpha_min, alpha_max]`. On a quadratic the first fit is already the exact
/// Cauchy step.
pub fn asd(
    eval: &mut Evaluator<'_>,
    x: &[f64],
    f: f64,
    g: &[f64],
    beta0: f64,
    max_refine: usize,
    alpha_min: f64,
    alpha_max: f64,
) -> Result<AsdOutcome, LineSearchError> {
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(LineSearchError::InvalidInput(format!("beta0 must be positive, got {beta0:e}")));
    }
    let gg = norm_sq(g);
    if !(gg > 0.0) {
        return Err(LineSearchError::InvalidInput("zero gradient".into()));
    }
    let clamp = |a: f64| a.min(alpha_max).max(alpha_min);
    let mut beta = beta0;
    for i in 0..=max_refine {
        let phi = eval.value(&step(x, beta, g));
        let last = i == max_refine;
        if !phi.is_finite() {
            beta *= 0.1;
            continue;
        }
        let denom = 2.0 * (phi - f + beta * gg);
        if denom > 0.0 {
            let bar = gg * beta * beta / denom;
            if bar <= 10.0 * beta || last {
                return Ok(AsdOutcome { alpha: clamp(bar), f_evals: i + 1, degenerate: false });
            }
        }
        beta *= 10.0;
    }
    Ok(AsdOutcome { alpha: clamp(beta0), f_evals: max_refine + 1, degenerate: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Objective, QuadraticProblem};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    struct Fn1 {
        f: fn(f64) -> f64,
        df: fn(f64) -> f64,
    }

    impl Objective for Fn1 {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            (self.f)(x[0])
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vec![(self.df)(x[0])]
        }
        fn x0(&self) -> Vec<f64> {
            vec![1.0]
        }
    }

    fn half_square() -> Fn1 {
        Fn1 { f: |x| 0.5 * x * x, df: |x| x }
    }

    #[test]
    fn memory_keeps_last_m_plus_one() {
        let mut mem = NonmonotoneMemory::new(2);
        assert_eq!(mem.f_ref(), f64::NEG_INFINITY);
        for v in [5.0, 1.0, 2.0, 3.0] {
            mem.push(v);
        }
        assert_eq!(mem.len(), 3);
        assert_eq!(mem.f_ref(), 3.0);
        assert_eq!(mem.current(), Some(3.0));
        let mut mem = NonmonotoneMemory::with_initial(0, 4.0);
        mem.push(1.0);
        assert_eq!(mem.f_ref(), 1.0);
    }

    #[test]
    fn improved_gll_accepts_exact_minimiser() {
        let obj = half_square();
        let mut ev = Evaluator::new(&obj);
        let mem = NonmonotoneMemory::with_initial(0, 0.5);
        let out = improved_gll(&mut ev, &[1.0], 0.5, &[1.0], &mem, 1.0, 1e-4, 30).unwrap();
        assert_eq!(out.lambda, 1.0);
        assert_eq!(out.extra_trials, 0);
        assert_eq!(out.f_new, 0.0);
        assert_eq!(ev.f_evals, 1);
    }

    #[test]
    fn improved_gll_interpolates_once() {
        let obj = half_square();
        let mut ev = Evaluator::new(&obj);
        let mem = NonmonotoneMemory::with_initial(0, 0.5);
        let out = improved_gll(&mut ev, &[1.0], 0.5, &[1.0], &mem, 10.0, 1e-4, 30).unwrap();
        // 1·100 / (2·(40.5 − 0.5 + 10)) = 1
        assert_eq!(out.trials, vec![10.0, 1.0]);
        assert_eq!(out.lambda, 1.0);
        assert_eq!(out.extra_trials, 1);
        assert_eq!(ev.f_evals, 2);
        assert!(out.f_new <= out.f_ref - 1e-4 * out.lambda);
    }

    #[test]
    fn improved_gll_exhausts_on_ascent_direction() {
        // f(x) = x with a sign-flipped gradient: every trial increases f.
        let obj = Fn1 { f: |x| x, df: |_| 1.0 };
        let mut ev = Evaluator::new(&obj);
        let mem = NonmonotoneMemory::with_initial(0, 0.0);
        let err = improved_gll(&mut ev, &[0.0], 0.0, &[-1.0], &mem, 1.0, 1e-4, 3).unwrap_err();
        // ᾱ = α²/(2(α + α)) = α/4 lies in [0.1α, 0.9α]: trials 1, 1/4, 1/16
        assert_eq!(err, LineSearchError::Exhausted { trials: 3, last_alpha: 0.0625 });
        assert_eq!(ev.f_evals, 3);
    }

    #[test]
    fn improved_gll_on_linear_descent_accepts_first_trial() {
        let obj = Fn1 { f: |x| -x, df: |_| -1.0 };
        let mut ev = Evaluator::new(&obj);
        let mem = NonmonotoneMemory::with_initial(0, 0.0);
        let out = improved_gll(&mut ev, &[0.0], 0.0, &[-1.0], &mem, 1.0, 1e-4, 1).unwrap();
        assert_eq!(out.lambda, 1.0);
    }

    #[test]
    fn gll_backtrack_hand_trace() {
        let obj = half_square();
        let mut ev = Evaluator::new(&obj);
        let mem = NonmonotoneMemory::with_initial(0, 0.5);
        let out = gll_backtrack(&mut ev, &[1.0], &[1.0], &mem, 10.0, 1e-4, 0.5, 30).unwrap();
        assert_eq!(out.trials, vec![10.0, 5.0, 2.5, 1.25]);
        assert_eq!(out.lambda, 1.25);
        assert_eq!(out.extra_trials, 3);
        assert_eq!(out.f_new, 0.03125);

        let mut ev = Evaluator::new(&obj);
        let out = gll_backtrack(&mut ev, &[1.0], &[1.0], &mem, 1.0, 1e-4, 0.5, 30).unwrap();
        assert_eq!((out.lambda, out.extra_trials), (1.0, 0));
    }

    #[test]
    fn gll_backtrack_exhausts_on_ascent_direction() {
        let obj = Fn1 { f: |x| x, df: |_| 1.0 };
        let mut ev = Evaluator::new(&obj);
        let mem = NonmonotoneMemory::with_initial(3, 0.0);
        let err = gll_backtrack(&mut ev, &[0.0], &[-1.0], &mem, 1.0, 1e-4, 0.5, 5).unwrap_err();
        assert!(matches!(err, LineSearchError::Exhausted { trials: 5, .. }));
    }

    #[test]
    fn nonmonotone_reference_allows_increase() {
        let obj = half_square();
        let mut ev = Evaluator::new(&obj);
        let mut mem = NonmonotoneMemory::new(2);
        mem.push(10.0);
        mem.push(0.5);
        // f(1 − 2.5) = 1.125 > f(x) but below f_ref = 10
        let out = improved_gll(&mut ev, &[1.0], 0.5, &[1.0], &mem, 2.5, 1e-4, 30).unwrap();
        assert_eq!(out.lambda, 2.5);
        assert!(out.f_new > 0.5);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let obj = half_square();
        let mut ev = Evaluator::new(&obj);
        let mem = NonmonotoneMemory::with_initial(0, 0.5);
        assert!(improved_gll(&mut ev, &[1.0], 0.5, &[0.0], &mem, 1.0, 1e-4, 30).is_err());
        assert!(improved_gll(&mut ev, &[1.0], 0.5, &[1.0], &mem, -1.0, 1e-4, 30).is_err());
        assert!(improved_gll(&mut ev, &[1.0], 0.5, &[1.0], &NonmonotoneMemory::new(0), 1.0, 1e-4, 30).is_err());
        assert!(gll_backtrack(&mut ev, &[1.0], &[1.0], &mem, 1.0, 1e-4, 1.0, 30).is_err());
        assert!(asd(&mut ev, &[1.0], 0.5, &[1.0], 0.0, 2, 1e-10, 1e5).is_err());
        assert_eq!(ev.f_evals, 0);
    }

    #[test]
    fn asd_is_exact_on_diagonal_quadratic() {
        let p = QuadraticProblem::diagonal(vec![1.0, 2.0, 3.0], vec![0.0; 3], vec![1.0; 3]).unwrap();
        // g = (1, 1, 1): gᵀg / gᵀHg = 3/6; g = (1, 2, 3): 14/36
        for (x, want) in [([1.0, 0.5, 1.0 / 3.0], 0.5), ([1.0, 1.0, 1.0], 14.0 / 36.0)] {
            let (f, g) = p.value_gradient(&x).unwrap();
            let golden = golden_section(|a| p.value_gradient(&[x[0] - a * g[0], x[1] - a * g[1], x[2] - a * g[2]]).unwrap().0, 0.0, 2.0);
            assert_relative_eq!(golden, want, max_relative = 1e-7);
            for beta0 in [1e-3, 0.1, 0.5, 1.0, 7.0, 100.0] {
                let mut ev = Evaluator::new(&p);
                let out = asd(&mut ev, &x, f, &g, beta0, 2, 1e-10, 1e5).unwrap();
                assert_relative_eq!(out.alpha, want, max_relative = 1e-12);
                assert!(!out.degenerate);
                assert_eq!(out.f_evals, ev.f_evals);
            }
        }
    }

    fn golden_section(phi: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-12 {
            let (c, d) = (b - r * (b - a), a + r * (b - a));
            if phi(c) < phi(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn asd_quartic_fit_matches_hand_arithmetic() {
        let obj = Fn1 { f: |x| x.powi(4), df: |x| 4.0 * x.powi(3) };
        let mut ev = Evaluator::new(&obj);
        let out = asd(&mut ev, &[1.0], 1.0, &[4.0], 0.5, 2, 1e-10, 1e5).unwrap();
        // explicit fit: c = (φ(β) − φ(0) − βφ′(0)) / β², minimiser −φ′(0) / (2c)
        let (phi0, dphi0, b) = (1.0f64, -16.0f64, 0.5f64);
        let c = ((1.0 - 4.0 * b).powi(4) - phi0 - b * dphi0) / (b * b);
        assert_relative_eq!(out.alpha, -dphi0 / (2.0 * c), max_relative = 1e-15);
        assert_relative_eq!(out.alpha, 0.25, max_relative = 1e-15);
        assert_eq!(out.f_evals, 1);
    }

    #[test]
    fn asd_flags_concave_samples() {
        // φ(α) = −α² − α is concave for every β
        let obj = Fn1 { f: |x| -x * x - x, df: |x| -2.0 * x - 1.0 };
        let mut ev = Evaluator::new(&obj);
        let out = asd(&mut ev, &[0.0], 0.0, &[-1.0], 0.5, 3, 1e-10, 1e5).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.alpha, 0.5);
        assert_eq!(out.f_evals, 4);
        assert_eq!(ev.f_evals, 4);
    }

    #[test]
    fn asd_resamples_when_minimiser_is_far() {
        // Cauchy step 10⁴ from β₀ = 1: samples at 1, 10 and 100
        let p = QuadraticProblem::diagonal(vec![1e-4], vec![0.0], vec![1.0]).unwrap();
        let (f, g) = p.value_gradient(&[1.0]).unwrap();
        let mut ev = Evaluator::new(&p);
        let out = asd(&mut ev, &[1.0], f, &g, 1.0, 2, 1e-10, 1e5).unwrap();
        assert_relative_eq!(out.alpha, 1e4, max_relative = 1e-10);
        assert_eq!(out.f_evals, 3);
        let mut ev = Evaluator::new(&p);
        let out = asd(&mut ev, &[1.0], f, &g, 1.0, 2, 1e-10, 50.0).unwrap();
        assert_eq!(out.alpha, 50.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn accepted_steps_satisfy_the_nonmonotone_test(
            lambda in 0.1f64..100.0,
            x0 in -10.0f64..10.0,
            alpha0 in 1e-3f64..1e3,
            extra in prop::collection::vec(0.0f64..50.0, 0..4),
        ) {
            let p = QuadraticProblem::diagonal(vec![lambda], vec![0.0], vec![x0]).unwrap();
            prop_assume!(x0.abs() > 1e-6);
            let (f, g) = p.value_gradient(&[x0]).unwrap();
            let mut mem = NonmonotoneMemory::new(extra.len());
            for e in &extra {
                mem.push(f + e);
            }
            mem.push(f);
            let gg = g[0] * g[0];
            let mut ev = Evaluator::new(&p);
            let out = improved_gll(&mut ev, &[x0], f, &g, &mem, alpha0, 1e-4, 60).unwrap();
            prop_assert!(out.f_new <= mem.f_ref() - 1e-4 * out.lambda * gg);
            for w in out.trials.windows(2) {
                let (a, next) = (w[0], w[1]);
                prop_assert!(next == 0.5 * a || (next >= 0.1 * a && next <= 0.9 * a));
            }
            prop_assert_eq!(out.extra_trials + 1, ev.f_evals);

            let mut ev = Evaluator::new(&p);
            let out = gll_backtrack(&mut ev, &[x0], &g, &mem, alpha0, 1e-4, 0.5, 60).unwrap();
            prop_assert!(out.f_new <= mem.f_ref() - 1e-4 * out.lambda * gg);
        }

        #[test]
        fn monotone_memory_forces_decrease(lambda in 0.1f64..100.0, alpha0 in 1e-3f64..1e3) {
            let p = QuadraticProblem::diagonal(vec![lambda], vec![0.0], vec![1.0]).unwrap();
            let (f, g) = p.value_gradient(&[1.0]).unwrap();
            let mem = NonmonotoneMemory::with_initial(0, f);
            let mut ev = Evaluator::new(&p);
            let out = improved_gll(&mut ev, &[1.0], f, &g, &mem, alpha0, 1e-4, 60).unwrap();
            prop_assert!(out.f_new < f);
        }
    }
}
