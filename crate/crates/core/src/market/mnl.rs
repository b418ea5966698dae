use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::linalg::Matrix;

/// Multinomial logit segment with an outside option:
/// `d_i(p) = exp(a_i - b_i p_i) / (1 + Σ_k exp(a_k - b_k p_k))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MnlSegmentModel {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl MnlSegmentModel {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(PricingError::field("a", "empty utility vector"));
        }
        if a.len() != b.len() {
            return Err(PricingError::field(
                "b",
                format!("length {} does not match a (length {})", b.len(), a.len()),
            ));
        }
        if let Some(i) = a.iter().position(|x| !x.is_finite()) {
            return Err(PricingError::field(format!("a[{i}]"), "must be finite"));
        }
        if let Some(i) = b.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(PricingError::field(
                format!("b[{i}]"),
                format!("{} must be positive and finite", b[i]),
            ));
        }
        Ok(MnlSegmentModel { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Choice probabilities, computed with a log-sum-exp shift.
    pub(crate) fn demand_unchecked(&self, p: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = self
            .a
            .iter()
            .zip(&self.b)
            .zip(p)
            .map(|((a, b), p)| a - b * p)
            .collect();
        let shift = u.iter().copied().fold(0.0f64, f64::max);
        let exps: Vec<f64> = u.iter().map(|x| (x - shift).exp()).collect();
        let denom = (-shift).exp() + exps.iter().sum::<f64>();
        exps.into_iter().map(|e| e / denom).collect()
    }

    /// `∂d_i/∂p_k = b_k d_k (d_i - [i = k])`.
    pub(crate) fn jacobian_unchecked(&self, p: &[f64]) -> Matrix {
        let d = self.demand_unchecked(p);
        let n = self.dim();
        let mut j = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let delta = if i == k { 1.0 } else { 0.0 };
                j[(i, k)] = self.b[k] * d[k] * (d[i] - delta);
            }
        }
        j
    }

    /// Prices with constant adjusted markup: `p_i = 1/b_i + markup`.
    pub fn markup_prices(&self, markup: f64) -> Vec<f64> {
        self.b.iter().map(|b| 1.0 / b + markup).collect()
    }
}
