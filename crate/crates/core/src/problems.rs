//! Test problems: three diagonal quadratics, six chained nonquadratic
//! functions with analytic gradients, and a seeded SPD-quadratic factory.
//!
//! Chained functions treat out-of-range neighbours (`x_0`, `x_{n+1}`, ...) as
//! zero.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::model::{gradient_check, Hessian, Objective, QuadraticProblem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("unknown problem '{0}'")]
    Unknown(String),
    #[error("{name}: invalid dimension {n} ({reason})")]
    InvalidDimension { name: &'static str, n: usize, reason: &'static str },
    #[error("kappa must be >= 1, got {0}")]
    InvalidKappa(f64),
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_sphere(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = crate::linalg::norm(&v);
        if nrm > 0.0 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}

/// `λ₁ = 0.1`, `λᵢ = i` otherwise; `b = 1`, `x₀ = 0`.
pub fn make_problem_1(n: usize) -> Result<QuadraticProblem, ProblemError> {
    if n < 2 {
        return Err(ProblemError::InvalidDimension { name: "problem1", n, reason: "need n >= 2" });
    }
    let lambda = (1..=n).map(|i| if i == 1 { 0.1 } else { i as f64 }).collect();
    Ok(QuadraticProblem::diagonal(lambda, vec![1.0; n], vec![0.0; n]).expect("valid by construction"))
}

/// Two spectral bands `[1, 1 + 0.2(κ−1)]` and `[0.8κ, κ]` of equal size, `b = 0`,
/// random `x₀` on the unit sphere.
pub fn make_problem_2(n: usize, kappa: f64, seed: u64) -> Result<QuadraticProblem, ProblemError> {
    if n < 2 || n % 2 != 0 {
        return Err(ProblemError::InvalidDimension { name: "problem2", n, reason: "n must be even" });
    }
    if !(kappa >= 1.0) {
        return Err(ProblemError::InvalidKappa(kappa));
    }
    let mut r = rng(seed);
    let half = n / 2;
    let lo_hi = 1.0 + 0.2 * (kappa - 1.0);
    let lambda: Vec<f64> = (0..n)
        .map(|i| {
            let u: f64 = r.random();
            if i < half {
                1.0 + u * (lo_hi - 1.0)
            } else {
                0.8 * kappa + u * 0.2 * kappa
            }
        })
        .collect();
    let x0 = unit_sphere(n, &mut r);
    Ok(QuadraticProblem::diagonal(lambda, vec![0.0; n], x0).expect("valid by construction"))
}

/// Smallest admissible eigenvalue of problem 3 relative to `κ`.
pub const PROBLEM3_FLOOR: f64 = 1e-6;

/// `λᵢ = κ/2 · (cos((n−i)/(n−1)·π) + 1)` with eigenvalues below `κ·10⁻⁶` raised to
/// that floor, `b = 0`, random `x₀` on the unit sphere.
pub fn make_problem_3(n: usize, kappa: f64, seed: u64) -> Result<QuadraticProblem, ProblemError> {
    if n < 2 {
        return Err(ProblemError::InvalidDimension { name: "problem3", n, reason: "need n >= 2" });
    }
    if !(kappa >= 1.0) {
        return Err(ProblemError::InvalidKappa(kappa));
    }
    let floor = kappa * PROBLEM3_FLOOR;
    let lambda = problem3_spectrum(n, kappa).into_iter().map(|l| l.max(floor)).collect();
    let x0 = unit_sphere(n, &mut rng(seed));
    Ok(QuadraticProblem::diagonal(lambda, vec![0.0; n], x0).expect("valid by construction"))
}

/// Raw problem-3 spectrum before flooring (its first entry is zero).
pub fn problem3_spectrum(n: usize, kappa: f64) -> Vec<f64> {
    let d = (n - 1) as f64;
    (1..=n).map(|i| kappa / 2.0 * (((n - i) as f64 / d * PI).cos() + 1.0)).collect()
}

fn planted_spectrum(n: usize, kappa: f64, r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && kappa >= 1.0);
    let mut lambda: Vec<f64> = (0..n).map(|_| kappa.powf(r.random::<f64>())).collect();
    lambda[0] = 1.0;
    if n >= 2 {
        lambda[1] = kappa;
    }
    let b: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
    let x0: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
    (lambda, b, x0)
}

/// Random SPD quadratic with eigenvalues log-uniform in `[1, κ]` (both endpoints
/// planted when `n ≥ 2`), conjugated by a random orthogonal matrix for `n ≤ 50`
/// and kept diagonal above. `b` and `x₀` are standard normal.
pub fn random_spd_quadratic(n: usize, kappa: f64, seed: u64) -> QuadraticProblem {
    let mut r = rng(seed);
    let (lambda, b, x0) = planted_spectrum(n, kappa, &mut r);
    let hessian = if n <= 50 {
        let q = random_orthogonal(n, &mut r);
        let d = DMatrix::from_diagonal(&DVector::from_vec(lambda));
        let h = &q * d * q.transpose();
        Hessian::Dense((&h + h.transpose()) * 0.5)
    } else {
        Hessian::Diagonal(lambda)
    };
    QuadraticProblem::new(hessian, b, x0).expect("random SPD construction")
}

fn random_orthogonal(n: usize, r: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..n {
        if rr[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Rotated 3-D quadratic with eigenvalues `κ`, `κ^u` (`u` uniform in
/// `[0.25, 0.75]`) and `1`, `b = 0`, and `x₀` placed so that the initial
/// gradient has weight of magnitude in `[0.5, 1]` on every eigenvector.
///
/// Returns the problem and its planted eigenvalues in descending order.
pub fn separated_quadratic_3d(kappa: f64, seed: u64) -> (QuadraticProblem, [f64; 3]) {
    assert!(kappa >= 1.0);
    let mut r = rng(seed);
    let lambda = [kappa, kappa.powf(0.25 + 0.5 * r.random::<f64>()), 1.0];
    let u: Vec<f64> = (0..3)
        .map(|_| {
            let m = 0.5 + 0.5 * r.random::<f64>();
            if r.random::<bool>() { m } else { -m }
        })
        .collect();
    let q = random_orthogonal(3, &mut r);
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(&lambda));
    let h = &q * d * q.transpose();
    let h = (&h + h.transpose()) * 0.5;
    let y = DVector::from_iterator(3, u.iter().zip(&lambda).map(|(ui, l)| ui / l));
    let x0 = (&q * y).as_slice().to_vec();
    let p = QuadraticProblem::new(Hessian::Dense(h), vec![0.0; 3], x0).expect("valid by construction");
    (p, lambda)
}

/// The spectrum, `b` and `x₀` of [`random_spd_quadratic`] with the Hessian kept
/// diagonal at every size.
pub fn random_diagonal_quadratic(n: usize, kappa: f64, seed: u64) -> QuadraticProblem {
    let (lambda, b, x0) = planted_spectrum(n, kappa, &mut rng(seed));
    QuadraticProblem::diagonal(lambda, b, x0).expect("random SPD construction")
}

#[inline]
fn at(x: &[f64], i: isize) -> f64 {
    if i < 0 || i as usize >= x.len() {
        0.0
    } else {
        x[i as usize]
    }
}

#[inline]
fn add(g: &mut [f64], i: isize, v: f64) {
    if i >= 0 && (i as usize) < g.len() {
        g[i as usize] += v;
    }
}

fn check_chained(name: &'static str, n: usize) -> Result<(), ProblemError> {
    if n < 4 {
        Err(ProblemError::InvalidDimension { name, n, reason: "chained problems need n >= 4" })
    } else {
        Ok(())
    }
}

/// Broyden tridiagonal: `Σ ((3 − 2xᵢ)xᵢ − x_{i−1} − 2x_{i+1} + 1)²`, `x₀ = −1`.
#[derive(Debug, Clone)]
pub struct Broydn3d {
    n: usize,
}

impl Broydn3d {
    fn residual(x: &[f64], i: isize) -> f64 {
        let xi = at(x, i);
        (3.0 - 2.0 * xi) * xi - at(x, i - 1) - 2.0 * at(x, i + 1) + 1.0
    }
}

impl Objective for Broydn3d {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        (0..self.n as isize).map(|i| Self::residual(x, i).powi(2)).sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for i in 0..self.n as isize {
            let r = 2.0 * Self::residual(x, i);
            add(&mut g, i, r * (3.0 - 4.0 * x[i as usize]));
            add(&mut g, i - 1, -r);
            add(&mut g, i + 1, -2.0 * r);
        }
        g
    }
    fn x0(&self) -> Vec<f64> {
        vec![-1.0; self.n]
    }
    fn name(&self) -> &str {
        "broydn3d"
    }
}

/// `Σ_{i<n} cos(xᵢ² − 0.5x_{i+1})`, `x₀ = 1`.
#[derive(Debug, Clone)]
pub struct Cosine {
    n: usize,
}

impl Objective for Cosine {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.windows(2).map(|w| (w[0] * w[0] - 0.5 * w[1]).cos()).sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for i in 0..self.n - 1 {
            let s = (x[i] * x[i] - 0.5 * x[i + 1]).sin();
            g[i] -= 2.0 * x[i] * s;
            g[i + 1] += 0.5 * s;
        }
        g
    }
    fn x0(&self) -> Vec<f64> {
        vec![1.0; self.n]
    }
    fn name(&self) -> &str {
        "cosine"
    }
}

/// DIXMAAN variant J with `α = 1`, `β = γ = δ = 0.0625`, `m = n/3`, `x₀ = 2`.
#[derive(Debug, Clone)]
pub struct Dixmaanj {
    n: usize,
}

impl Dixmaanj {
    const ALPHA: f64 = 1.0;
    const BETA: f64 = 0.0625;
    const GAMMA: f64 = 0.0625;
    const DELTA: f64 = 0.0625;
}

impl Objective for Dixmaanj {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let m = n / 3;
        let nf = n as f64;
        let mut f = 1.0;
        for i in 0..n {
            let w = (i + 1) as f64 / nf;
            f += Self::ALPHA * w * w * x[i] * x[i];
        }
        for i in 0..n - 1 {
            let u = x[i + 1] + x[i + 1] * x[i + 1];
            f += Self::BETA * x[i] * x[i] * u * u;
        }
        for i in 0..2 * m {
            f += Self::GAMMA * x[i] * x[i] * x[i + m].powi(4);
        }
        for i in 0..m {
            let w = (i + 1) as f64 / nf;
            f += Self::DELTA * w * w * x[i] * x[i + 2 * m];
        }
        f
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let m = n / 3;
        let nf = n as f64;
        let mut g = vec![0.0; n];
        for i in 0..n {
            let w = (i + 1) as f64 / nf;
            g[i] += 2.0 * Self::ALPHA * w * w * x[i];
        }
        for i in 0..n - 1 {
            let u = x[i + 1] + x[i + 1] * x[i + 1];
            g[i] += 2.0 * Self::BETA * x[i] * u * u;
            g[i + 1] += 2.0 * Self::BETA * x[i] * x[i] * u * (1.0 + 2.0 * x[i + 1]);
        }
        for i in 0..2 * m {
            g[i] += 2.0 * Self::GAMMA * x[i] * x[i + m].powi(4);
            g[i + m] += 4.0 * Self::GAMMA * x[i] * x[i] * x[i + m].powi(3);
        }
        for i in 0..m {
            let w = (i + 1) as f64 / nf;
            g[i] += Self::DELTA * w * w * x[i + 2 * m];
            g[i + 2 * m] += Self::DELTA * w * w * x[i];
        }
        g
    }
    fn x0(&self) -> Vec<f64> {
        vec![2.0; self.n]
    }
    fn name(&self) -> &str {
        "dixmaanj"
    }
}

/// `Σ_{i<n} [(xᵢ² + x_{i+1}²)² − 4xᵢ + 3]`, `x₀ = 2`.
#[derive(Debug, Clone)]
pub struct Engval1 {
    n: usize,
}

impl Objective for Engval1 {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| {
                let v = w[0] * w[0] + w[1] * w[1];
                v * v - 4.0 * w[0] + 3.0
            })
            .sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for i in 0..self.n - 1 {
            let v = x[i] * x[i] + x[i + 1] * x[i + 1];
            g[i] += 4.0 * v * x[i] - 4.0;
            g[i + 1] += 4.0 * v * x[i + 1];
        }
        g
    }
    fn x0(&self) -> Vec<f64> {
        vec![2.0; self.n]
    }
    fn name(&self) -> &str {
        "engval1"
    }
}

/// Sum of squares of the chained residuals
/// `Fᵢ = 8xᵢ(xᵢ² − x_{i−1}) − 2(1 − xᵢ) + 4(xᵢ − x_{i+1}²) + x_{i−1}² − x_{i−2} + x_{i+1} − x_{i+2}²`
/// for `i = 1..n`, `x₀ = −1`.
#[derive(Debug, Clone)]
pub struct Firose {
    n: usize,
}

impl Firose {
    fn residual(x: &[f64], i: isize) -> f64 {
        let xi = at(x, i);
        let xm1 = at(x, i - 1);
        let xp1 = at(x, i + 1);
        8.0 * xi * (xi * xi - xm1) - 2.0 * (1.0 - xi) + 4.0 * (xi - xp1 * xp1) + xm1 * xm1 - at(x, i - 2) + xp1
            - at(x, i + 2).powi(2)
    }
}

impl Objective for Firose {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        (0..self.n as isize).map(|i| Self::residual(x, i).powi(2)).sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for i in 0..self.n as isize {
            let r = 2.0 * Self::residual(x, i);
            let xi = at(x, i);
            let xm1 = at(x, i - 1);
            add(&mut g, i, r * (24.0 * xi * xi - 8.0 * xm1 + 6.0));
            add(&mut g, i - 1, r * (-8.0 * xi + 2.0 * xm1));
            add(&mut g, i - 2, -r);
            add(&mut g, i + 1, r * (1.0 - 8.0 * at(x, i + 1)));
            add(&mut g, i + 2, r * (-2.0 * at(x, i + 2)));
        }
        g
    }
    fn x0(&self) -> Vec<f64> {
        vec![-1.0; self.n]
    }
    fn name(&self) -> &str {
        "firose"
    }
}

/// Chained Rosenbrock-type function with separate first and last terms, `x₀ = −1`.
#[derive(Debug, Clone)]
pub struct Trirose2 {
    n: usize,
}

impl Trirose2 {
    fn inner(x: &[f64], i: usize) -> f64 {
        8.0 * x[i] * (x[i] * x[i] - x[i - 1]) - 2.0 * (1.0 - x[i]) + 4.0 * (x[i] - x[i + 1] * x[i + 1])
    }
    fn last(x: &[f64]) -> f64 {
        let n = x.len();
        8.0 * x[n - 1] * (x[n - 1] * x[n - 1] - x[n - 2]) - 2.0 * (1.0 - x[n - 1])
    }
}

impl Objective for Trirose2 {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut f = 16.0 * (x[0] - x[1] * x[1]).powi(2);
        for i in 1..n - 1 {
            f += Self::inner(x, i).powi(2);
        }
        f + Self::last(x).powi(2)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n];
        let d = x[0] - x[1] * x[1];
        g[0] += 32.0 * d;
        g[1] -= 64.0 * x[1] * d;
        for i in 1..n - 1 {
            let r = 2.0 * Self::inner(x, i);
            g[i] += r * (24.0 * x[i] * x[i] - 8.0 * x[i - 1] + 6.0);
            g[i - 1] -= r * 8.0 * x[i];
            g[i + 1] -= r * 8.0 * x[i + 1];
        }
        let r = 2.0 * Self::last(x);
        g[n - 1] += r * (24.0 * x[n - 1] * x[n - 1] - 8.0 * x[n - 2] + 2.0);
        g[n - 2] -= r * 8.0 * x[n - 1];
        g
    }
    fn x0(&self) -> Vec<f64> {
        vec![-1.0; self.n]
    }
    fn name(&self) -> &str {
        "trirose2"
    }
}

pub fn broydn3d(n: usize) -> Result<Broydn3d, ProblemError> {
    check_chained("broydn3d", n).map(|_| Broydn3d { n })
}

pub fn cosine(n: usize) -> Result<Cosine, ProblemError> {
    check_chained("cosine", n).map(|_| Cosine { n })
}

pub fn dixmaanj(n: usize) -> Result<Dixmaanj, ProblemError> {
    check_chained("dixmaanj", n)?;
    if n % 3 != 0 {
        return Err(ProblemError::InvalidDimension { name: "dixmaanj", n, reason: "n must be divisible by 3" });
    }
    Ok(Dixmaanj { n })
}

pub fn engval1(n: usize) -> Result<Engval1, ProblemError> {
    check_chained("engval1", n).map(|_| Engval1 { n })
}

pub fn firose(n: usize) -> Result<Firose, ProblemError> {
    check_chained("firose", n).map(|_| Firose { n })
}

pub fn trirose2(n: usize) -> Result<Trirose2, ProblemError> {
    check_chained("trirose2", n).map(|_| Trirose2 { n })
}

/// Names accepted by the problem registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    Problem1,
    Problem2,
    Problem3,
    Broydn3d,
    Cosine,
    Dixmaanj,
    Engval1,
    Firose,
    Trirose2,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 9] = [
        ProblemKind::Problem1,
        ProblemKind::Problem2,
        ProblemKind::Problem3,
        ProblemKind::Broydn3d,
        ProblemKind::Cosine,
        ProblemKind::Dixmaanj,
        ProblemKind::Engval1,
        ProblemKind::Firose,
        ProblemKind::Trirose2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Problem1 => "problem1",
            ProblemKind::Problem2 => "problem2",
            ProblemKind::Problem3 => "problem3",
            ProblemKind::Broydn3d => "broydn3d",
            ProblemKind::Cosine => "cosine",
            ProblemKind::Dixmaanj => "dixmaanj",
            ProblemKind::Engval1 => "engval1",
            ProblemKind::Firose => "firose",
            ProblemKind::Trirose2 => "trirose2",
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, ProblemKind::Problem1 | ProblemKind::Problem2 | ProblemKind::Problem3)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = ProblemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| ProblemError::Unknown(s.to_string()))
    }
}

/// Everything needed to instantiate a registry problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub n: usize,
    /// Condition parameter of problems 2 and 3.
    pub kappa: f64,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, n: usize) -> Self {
        Self { kind, n, kappa: 1e6, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn build(&self) -> Result<Problem, ProblemError> {
        let n = self.n;
        Ok(match self.kind {
            ProblemKind::Problem1 => Problem::Quadratic(make_problem_1(n)?),
            ProblemKind::Problem2 => Problem::Quadratic(make_problem_2(n, self.kappa, self.seed)?),
            ProblemKind::Problem3 => Problem::Quadratic(make_problem_3(n, self.kappa, self.seed)?),
            ProblemKind::Broydn3d => Problem::General(Box::new(broydn3d(n)?)),
            ProblemKind::Cosine => Problem::General(Box::new(cosine(n)?)),
            ProblemKind::Dixmaanj => Problem::General(Box::new(dixmaanj(n)?)),
            ProblemKind::Engval1 => Problem::General(Box::new(engval1(n)?)),
            ProblemKind::Firose => Problem::General(Box::new(firose(n)?)),
            ProblemKind::Trirose2 => Problem::General(Box::new(trirose2(n)?)),
        })
    }

    /// Conventions baked into the generated problem.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        match self.kind {
            ProblemKind::Problem1 => {
                notes.push(format!("kappa = {} from the explicit spectrum", n_over_tenth(self.n)))
            }
            ProblemKind::Problem3 => notes.push(format!(
                "eigenvalues below kappa*{PROBLEM3_FLOOR:e} raised to that floor"
            )),
            ProblemKind::Broydn3d | ProblemKind::Firose => {
                notes.push("out-of-range neighbours treated as zero".into())
            }
            _ => {}
        }
        if self.kind == ProblemKind::Firose {
            notes.push("residuals reconstructed from the printed dominant term".into());
        }
        notes
    }
}

fn n_over_tenth(n: usize) -> f64 {
    n as f64 / 0.1
}

/// Finite-difference gradient errors (see [`gradient_check`], step `10⁻⁵`) at
/// `x₀` and at `perturbations` points `x₀ + 0.5·N(0, I)`, in that order.
///
/// Smaller steps lose digits to cancellation once `f` reaches ~10⁵.
pub fn gradient_errors(obj: &dyn Objective, perturbations: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let x0 = obj.x0();
    let mut errs = vec![gradient_check(obj, &x0, 1e-5)];
    for _ in 0..perturbations {
        let x: Vec<f64> = x0.iter().map(|v| v + 0.5 * r.sample::<f64, _>(StandardNormal)).collect();
        errs.push(gradient_check(obj, &x, 1e-5));
    }
    errs
}

/// A built problem: either a quadratic model or a general smooth objective.
pub enum Problem {
    Quadratic(QuadraticProblem),
    General(Box<dyn Objective>),
}

impl Problem {
    pub fn objective(&self) -> &dyn Objective {
        match self {
            Problem::Quadratic(q) => q,
            Problem::General(o) => o.as_ref(),
        }
    }

    pub fn as_quadratic(&self) -> Option<&QuadraticProblem> {
        match self {
            Problem::Quadratic(q) => Some(q),
            Problem::General(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.objective().dim()
    }

    /// `λ_max / λ_min` for quadratic problems.
    pub fn kappa(&self) -> Option<f64> {
        self.as_quadratic().map(QuadraticProblem::kappa)
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Quadratic(q) => write!(f, "Quadratic(n = {})", q.dim()),
            Problem::General(o) => write!(f, "General({}, n = {})", o.name(), o.dim()),
        }
    }
}
