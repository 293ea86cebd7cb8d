//! Track-to-detection scoring and assignment.
//!
//! Scores are similarities in `[0, 1]`. Stage 1 multiplies the ground-plane
//! probability `P(D)`, the buffered IoU and the detection confidence; later
//! stages blend BIoU and `P(D)` by the predicted probabilities of the
//! image-plane and ground-plane filters.

mod lap;

pub use lap::{maximize_assignment, solve_assignment, ScoreMatrix};

use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::linalg::{inv2, psd_repair, Mat2, Vec2};

/// Degrees of freedom of the chi-squared reference distribution.
pub const DEFAULT_CHI2_DOF: u32 = 24;

/// Normalized Mahalanobis distance `d^T S^-1 d + ln|S|`.
pub fn mahalanobis_d(innovation: &Vec2, s: &Mat2) -> Result<f64> {
    let s = psd_repair(s);
    let (s_inv, det) = inv2(&s).ok_or(Error::SingularInnovation(s.determinant()))?;
    Ok((innovation.transpose() * s_inv * innovation)[0] + det.ln())
}

/// Chi-squared CDF with `k` degrees of freedom.
pub fn chi2_cdf(x: f64, k: u32) -> f64 {
    assert!(k >= 1, "chi-squared needs at least one degree of freedom");
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    gamma_lr(0.5 * k as f64, 0.5 * x).clamp(0.0, 1.0)
}

/// `1 - CDF(D)`; non-positive distances map to one.
pub fn p_of_d(d: f64, k: u32) -> f64 {
    if d.is_nan() {
        return 0.0;
    }
    1.0 - chi2_cdf(d.max(0.0), k)
}

pub fn stage1_score(p_d: f64, biou: f64, conf: f64) -> f64 {
    p_d * biou * conf
}

pub fn stage2_score(mu: &AssocModelProbs, p_d: f64, biou: f64, conf: f64) -> f64 {
    (mu.mu_i * biou + mu.mu_w * p_d) * conf
}

/// Probabilities that the image-plane (`I`) or ground-plane (`W`) filter
/// explains the track best.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocModelProbs {
    pub mu_i: f64,
    pub mu_w: f64,
}

impl Default for AssocModelProbs {
    fn default() -> Self {
        Self { mu_i: 0.5, mu_w: 0.5 }
    }
}

impl AssocModelProbs {
    pub fn new(mu_i: f64, mu_w: f64) -> Self {
        Self { mu_i, mu_w }
    }

    /// One Markov step with self-transition probabilities `p_ii`, `p_ww`.
    pub fn predict(&self, p_ii: f64, p_ww: f64) -> Self {
        let mu_i = p_ii * self.mu_i + (1.0 - p_ww) * self.mu_w;
        let mu_w = (1.0 - p_ii) * self.mu_i + p_ww * self.mu_w;
        let total = mu_i + mu_w;
        Self { mu_i: mu_i / total, mu_w: mu_w / total }
    }

    /// Bayes update with likelihoods `BIoU` (image) and `P(D)` (ground).
    pub fn update(&self, lambda_i: f64, lambda_w: f64) -> Result<Self> {
        let a = self.mu_i * lambda_i.max(0.0);
        let b = self.mu_w * lambda_w.max(0.0);
        let total = a + b;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::ZeroLikelihoods);
        }
        Ok(Self { mu_i: a / total, mu_w: b / total })
    }

    /// Like [`update`](Self::update) but keeps the prediction when both
    /// likelihoods vanish.
    pub fn update_or_keep(&self, lambda_i: f64, lambda_w: f64) -> Self {
        self.update(lambda_i, lambda_w).unwrap_or(*self)
    }
}
