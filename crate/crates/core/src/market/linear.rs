use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::linalg::{dot, Matrix};

/// Symmetric tolerance for `B`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Linear demand `d(p) = a - Bp` from a representative consumer.
///
/// `B` is symmetric positive definite and `a` is strictly positive, so the
/// unconstrained optimum `0.5 B⁻¹a` always has positive demand `0.5a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearModel {
    a: Vec<f64>,
    #[serde(rename = "B")]
    b: Matrix,
}

impl LinearModel {
    pub fn new(a: Vec<f64>, b: Matrix) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(PricingError::field("a", "empty intercept vector"));
        }
        if b.dim() != n {
            return Err(PricingError::field(
                "B",
                format!("matrix is {0}x{0}, expected {n}x{n}", b.dim()),
            ));
        }
        if let Some(i) = a.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(PricingError::field(
                format!("a[{i}]"),
                format!("{} must be positive and finite", a[i]),
            ));
        }
        let asym = b.asymmetry();
        if !(asym <= SYMMETRY_TOL) {
            return Err(PricingError::field(
                "B",
                format!("not symmetric (max asymmetry {asym:e})"),
            ));
        }
        if b.cholesky().is_none() {
            return Err(PricingError::field("B", "not positive definite"));
        }
        Ok(LinearModel { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub(crate) fn raw_demand(&self, p: &[f64]) -> Vec<f64> {
        let bp = self.b.mul_vec(p);
        self.a.iter().zip(bp).map(|(a, x)| a - x).collect()
    }

    pub(crate) fn jacobian(&self) -> Matrix {
        let n = self.dim();
        let mut j = self.b.clone();
        for i in 0..n {
            for k in 0..n {
                j[(i, k)] = -j[(i, k)];
            }
        }
        j
    }

    /// Gross utilities `u = B⁻¹a`.
    pub fn utilities(&self) -> Result<Vec<f64>> {
        let chol = self
            .b
            .cholesky()
            .ok_or_else(|| PricingError::numerical("B lost positive definiteness", 0.0))?;
        Ok(chol.solve(&self.a))
    }

    /// Profit-maximizing prices `0.5 B⁻¹a` and the resulting profit `0.25 a'B⁻¹a`.
    pub fn optimal(&self) -> Result<(Vec<f64>, f64)> {
        let u = self.utilities()?;
        let profit = 0.25 * dot(&u, &self.a);
        Ok((u.into_iter().map(|x| 0.5 * x).collect(), profit))
    }

    /// True when every off-diagonal entry of `B` is nonpositive.
    pub fn has_z_pattern(&self, tol: f64) -> bool {
        self.dim() == 1 || self.b.max_off_diagonal() <= tol
    }
}
