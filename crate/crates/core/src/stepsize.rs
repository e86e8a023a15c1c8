//! Stepsize rules: Cauchy, Barzilai–Borwein and their adaptive variants,
//! Yuan's two-dimensional stepsize, and the three-dimensional NY stepsizes.
//!
//! The NY stepsizes are reciprocals of the eigenvalues of the 3×3 matrix
//! `A = QᵀHQ`, where `Q` orthonormalises the gradients `g₀, g₁, g₂` of three
//! consecutive (exact or approximate) Cauchy iterations. `A` is never formed;
//! its entries are recovered from the Cauchy stepsizes and a few inner
//! products:
//!
//! ```text
//!     ⎡ 1/sd0     −√(βγ)       0      ⎤
//! A = ⎢ −√(βγ)    1/sd1     −√(β(1−γ))⎥
//!     ⎣   0     −√(β(1−γ))    a33     ⎦
//! ```
//!
//! and its characteristic polynomial `μ³ − t₁μ² + t₂μ − t₃` is solved in closed
//! form with the trigonometric Cardano formula.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{dot, norm_sq};
use crate::model::{Hessian, SecantPair, StepKind};

/// Below this value of `1 − γ` the three gradients span only two dimensions.
pub const GAMMA_TOL: f64 = 1e-12;
/// Relative tolerance for treating a slightly positive depressed-cubic `p` as zero.
pub const P_TOL: f64 = 1e-10;
/// Relative tolerance on `q` for recognising a triple root once `p` is zero.
pub const Q_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepsizeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-positive curvature sᵀy = {0:e}")]
    NonPositiveCurvature(f64),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("gradients span a degenerate subspace (1 − γ = {0:e})")]
    DegenerateSubspace(f64),
    #[error("invalid curvature estimate {0:e}")]
    InvalidCurvature(f64),
    #[error("depressed cubic has p = 0 but q = {0:e}")]
    DegenerateCubic(f64),
    #[error("no secant pairs available")]
    EmptyHistory,
}

type Result<T> = std::result::Result<T, StepsizeError>;

/// Exact line-search stepsize `gᵀg / gᵀHg` for a quadratic model.
pub fn cauchy_exact(g: &[f64], h: &Hessian) -> Result<f64> {
    if g.len() != h.dim() {
        return Err(StepsizeError::InvalidInput(format!(
            "gradient length {} does not match hessian dimension {}",
            g.len(),
            h.dim()
        )));
    }
    let gg = norm_sq(g);
    let ghg = h.quad_form(g);
    if !(ghg > 0.0) || !gg.is_finite() {
        return Err(StepsizeError::NumericalFailure(format!("gᵀHg = {ghg:e}")));
    }
    Ok(gg / ghg)
}

/// Long Barzilai–Borwein stepsize `sᵀs / sᵀy`.
pub fn bb1(s: &[f64], y: &[f64]) -> Result<f64> {
    bb1_pair(&SecantPair::from_vectors(s, y))
}

/// Short Barzilai–Borwein stepsize `sᵀy / yᵀy`.
pub fn bb2(s: &[f64], y: &[f64]) -> Result<f64> {
    bb2_pair(&SecantPair::from_vectors(s, y))
}

pub fn bb1_pair(p: &SecantPair) -> Result<f64> {
    if !(p.sy > 0.0) {
        return Err(StepsizeError::NonPositiveCurvature(p.sy));
    }
    Ok(p.ss / p.sy)
}

pub fn bb2_pair(p: &SecantPair) -> Result<f64> {
    if !(p.sy > 0.0) {
        return Err(StepsizeError::NonPositiveCurvature(p.sy));
    }
    Ok(p.sy / p.yy)
}

/// Adaptive BB stepsize: `pairs` is ordered oldest first, the last entry is the
/// current pair `(s_{k-1}, y_{k-1})`. Pairs with non-positive curvature
/// contribute `alpha_max` in place of their BB values.
pub fn abbmin(pairs: &[SecantPair], tau1: f64, m: usize, alpha_max: f64) -> Result<f64> {
    let last = pairs.last().ok_or(StepsizeError::EmptyHistory)?;
    let b1 = bb1_pair(last).unwrap_or(alpha_max);
    let b2 = bb2_pair(last).unwrap_or(alpha_max);
    if b2 / b1 < tau1 {
        let start = pairs.len().saturating_sub(m + 1);
        Ok(pairs[start..]
            .iter()
            .map(|p| bb2_pair(p).unwrap_or(alpha_max))
            .fold(f64::INFINITY, f64::min))
    } else {
        Ok(b1)
    }
}

fn mdf_sums(pairs: &[SecantPair]) -> (f64, f64) {
    pairs.iter().fold((0.0, 0.0), |(ss, sy), p| (ss + p.ss, sy + p.sy.abs()))
}

/// Multipoint stepsize over the last `m` pairs. `MDF1 = Σsᵀs / Σ|sᵀy|` and
/// `MDF2 = Σ|sᵀy| / Σsᵀs`; the previous `MDF2` uses the window shifted back by
/// one pair (or whatever is available).
pub fn mpsg(pairs: &[SecantPair], tau2: f64, m: usize) -> Result<f64> {
    if pairs.is_empty() {
        return Err(StepsizeError::EmptyHistory);
    }
    let m = m.max(1);
    let n = pairs.len();
    let (ss, sy) = mdf_sums(&pairs[n.saturating_sub(m)..]);
    if !(sy > 0.0) || !(ss > 0.0) {
        return Err(StepsizeError::NumericalFailure("Σ|sᵀy| = 0".into()));
    }
    let mdf1 = ss / sy;
    let mdf2 = sy / ss;
    if mdf2 / mdf1 < tau2 {
        let prev = if n >= 2 {
            let (pss, psy) = mdf_sums(&pairs[(n - 1).saturating_sub(m)..n - 1]);
            if pss > 0.0 && psy > 0.0 {
                psy / pss
            } else {
                mdf2
            }
        } else {
            mdf2
        };
        Ok(prev.min(mdf2))
    } else {
        Ok(mdf1)
    }
}

fn yuan_core(sd_prev: f64, sd_cur: f64, coupling_sq: f64) -> f64 {
    let a = 1.0 / sd_prev;
    let b = 1.0 / sd_cur;
    2.0 / (((a - b).powi(2) + 4.0 * coupling_sq).sqrt() + a + b)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(StepsizeError::InvalidInput(format!("{name} must be positive, got {v:e}")))
    }
}

/// Yuan stepsize from the previous and current Cauchy stepsizes, `‖g_k‖` and
/// `‖s_{k-1}‖`.
pub fn yuan(sd_prev: f64, sd_cur: f64, gnorm_k: f64, snorm_prev: f64) -> Result<f64> {
    check_positive("sd_prev", sd_prev)?;
    check_positive("sd_cur", sd_cur)?;
    check_positive("snorm_prev", snorm_prev)?;
    if !(gnorm_k >= 0.0) {
        return Err(StepsizeError::InvalidInput(format!("gnorm_k must be non-negative, got {gnorm_k:e}")));
    }
    Ok(yuan_core(sd_prev, sd_cur, (gnorm_k / snorm_prev).powi(2)))
}

/// Yuan stepsize with `‖s_{k-1}‖` replaced by `sd_prev · ‖g_{k-1}‖`, the length
/// of an exact steepest-descent step.
pub fn yuan_variant(sd_prev: f64, sd_cur: f64, gnorm_k: f64, gnorm_prev: f64) -> Result<f64> {
    check_positive("sd_prev", sd_prev)?;
    check_positive("sd_cur", sd_cur)?;
    check_positive("gnorm_prev", gnorm_prev)?;
    if !(gnorm_k >= 0.0) {
        return Err(StepsizeError::InvalidInput(format!("gnorm_k must be non-negative, got {gnorm_k:e}")));
    }
    Ok(yuan_core(sd_prev, sd_cur, (gnorm_k / (sd_prev * gnorm_prev)).powi(2)))
}

/// Entries of the transformed 3×3 Hessian and its characteristic cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NyCoefficients {
    pub beta: f64,
    pub gamma: f64,
    pub a33: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub p: f64,
    pub q: f64,
    pub sd0: f64,
    pub sd1: f64,
    pub sd2: f64,
}

impl NyCoefficients {
    /// Builds the cubic directly from the matrix entries `1/sd0`, `1/sd1`,
    /// `a33` and the couplings `β`, `γ`.
    pub fn from_entries(sd0: f64, sd1: f64, sd2: f64, beta: f64, gamma: f64, a33: f64) -> Self {
        let a11 = 1.0 / sd0;
        let a22 = 1.0 / sd1;
        let t1 = a11 + a22 + a33;
        let t2 = a11 * a22 + (a11 + a22) * a33 - beta;
        let t3 = a11 * a22 * a33 - a11 * beta * (1.0 - gamma) - a33 * beta * gamma;
        let (p, q) = depressed(t1, t2, t3);
        Self { beta, gamma, a33, t1, t2, t3, p, q, sd0, sd1, sd2 }
    }

    /// The 3×3 matrix these coefficients describe, row-major.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let c12 = -(self.beta * self.gamma).max(0.0).sqrt();
        let c23 = -(self.beta * (1.0 - self.gamma)).max(0.0).sqrt();
        [[1.0 / self.sd0, c12, 0.0], [c12, 1.0 / self.sd1, c23], [0.0, c23, self.a33]]
    }
}

fn depressed(t1: f64, t2: f64, t3: f64) -> (f64, f64) {
    let p = t2 - t1 * t1 / 3.0;
    let q = -2.0 * t1.powi(3) / 27.0 + t1 * t2 / 3.0 - t3;
    (p, q)
}

/// Forms [`NyCoefficients`] from three consecutive Cauchy stepsizes and the
/// gradients at which they were computed.
pub fn ny_coefficients(
    sd0: f64,
    sd1: f64,
    sd2: f64,
    g0: &[f64],
    g1: &[f64],
    g2: &[f64],
) -> Result<NyCoefficients> {
    check_positive("sd0", sd0)?;
    check_positive("sd1", sd1)?;
    check_positive("sd2", sd2)?;
    if g0.len() != g1.len() || g1.len() != g2.len() {
        return Err(StepsizeError::InvalidInput("gradient lengths differ".into()));
    }
    let n0 = norm_sq(g0);
    let n1 = norm_sq(g1);
    let n2 = norm_sq(g2);
    if !(n0 > 0.0 && n1 > 0.0 && n2 > 0.0) {
        return Err(StepsizeError::InvalidInput("gradients must be nonzero".into()));
    }
    let c20 = dot(g2, g0);
    let beta = n2 / (sd1 * sd1 * n1);
    let gamma = (c20 * c20 / (n0 * n2)).min(1.0);
    // 1 − γ = ‖g̃₂‖² / ‖g₂‖², with g̃₂ the part of g₂ orthogonal to g₀.
    let r = c20 / n0;
    let tilde_sq: f64 = g2.iter().zip(g0).map(|(a, b)| (a - r * b).powi(2)).sum();
    let one_minus_gamma = (tilde_sq / n2).min(1.0);
    if !(one_minus_gamma > GAMMA_TOL) {
        return Err(StepsizeError::DegenerateSubspace(one_minus_gamma));
    }
    let a33 = (1.0 / sd2 - gamma / sd0) / one_minus_gamma;
    if !(a33 > 0.0) || !a33.is_finite() {
        return Err(StepsizeError::InvalidCurvature(a33));
    }
    let mut c = NyCoefficients::from_entries(sd0, sd1, sd2, beta, gamma, a33);
    // keep t₃ consistent with the better-conditioned 1 − γ
    let a11 = 1.0 / sd0;
    let a22 = 1.0 / sd1;
    c.t3 = a11 * a22 * a33 - a11 * beta * one_minus_gamma - a33 * beta * gamma;
    let (p, q) = depressed(c.t1, c.t2, c.t3);
    c.p = p;
    c.q = q;
    Ok(c)
}

/// Real roots `μ₁ ≥ μ₂ ≥ μ₃` of `μ³ − t₁μ² + t₂μ − t₃` via the trigonometric
/// form of Cardano's formula. The cubic must come from a symmetric matrix.
pub fn cubic_roots_cardano(t1: f64, t2: f64, t3: f64) -> Result<[f64; 3]> {
    if !(t1.is_finite() && t2.is_finite() && t3.is_finite()) {
        return Err(StepsizeError::NumericalFailure("non-finite cubic coefficients".into()));
    }
    let (p, q) = depressed(t1, t2, t3);
    if p >= 0.0 {
        if p > P_TOL * t1.powi(2).max(1.0) {
            return Err(StepsizeError::NumericalFailure(format!("complex roots (p = {p:e})")));
        }
        if q.abs() <= Q_TOL * t1.abs().powi(3).max(1.0) {
            let m = t1 / 3.0;
            return Ok([m, m, m]);
        }
        return Err(StepsizeError::DegenerateCubic(q));
    }
    let shift = t1 / 3.0;
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mu1 = shift + r * phi.cos();
    let mu2 = shift + r * (phi - 2.0 * PI / 3.0).cos();
    let mu3 = shift + r * (phi + 2.0 * PI / 3.0).cos();
    Ok([mu1, mu2, mu3])
}

/// The three NY stepsizes `1/μ₁ ≤ 1/μ₂ ≤ 1/μ₃`.
pub fn ny_stepsizes(c: &NyCoefficients) -> Result<[f64; 3]> {
    let [m1, m2, m3] = cubic_roots_cardano(c.t1, c.t2, c.t3)?;
    if !(m3 > 0.0) {
        return Err(StepsizeError::InvalidCurvature(m3));
    }
    Ok([1.0 / m1, 1.0 / m2, 1.0 / m3])
}

/// Shortest NY stepsize, falling back to the Yuan variant of the first two
/// Cauchy steps whenever the three-dimensional construction breaks down.
///
/// Returns the stepsize and which rule produced it. Only invalid inputs or a
/// failing fallback produce an error; callers then use `sd2`.
pub fn ny_step(
    sd: [f64; 3],
    g0: &[f64],
    g1: &[f64],
    g2: &[f64],
) -> Result<(f64, StepKind)> {
    let attempt = ny_coefficients(sd[0], sd[1], sd[2], g0, g1, g2).and_then(|c| ny_stepsizes(&c));
    match attempt {
        Ok(a) => Ok((a[0], StepKind::NY)),
        Err(StepsizeError::InvalidInput(msg)) => Err(StepsizeError::InvalidInput(msg)),
        Err(e) => {
            log::debug!("NY stepsize unavailable ({e}); using Yuan variant");
            let yv = yuan_variant(sd[0], sd[1], norm_sq(g1).sqrt(), norm_sq(g0).sqrt())?;
            Ok((yv, StepKind::YV))
        }
    }
}
