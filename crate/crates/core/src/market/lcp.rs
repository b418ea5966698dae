//! Nonnegative demand restoration for the linear model.
//!
//! At a price `p` where `a - Bp` has negative entries, the representative
//! consumer's purchases are `d(p - y)` where `y` solves the linear
//! complementarity problem `y ≥ 0, w = (a - Bp) + By ≥ 0, y'w = 0`.
//! The realized profit is `p'w = R(p) + p'By ≥ R(p)`.

use serde::Serialize;

use super::{check_prices, LinearModel};
use crate::error::{PricingError, Result};
use crate::linalg::{dot, Matrix};

/// Adjusted demands in `[-REPORT_CLAMP, 0)` are reported as exactly zero.
pub const REPORT_CLAMP: f64 = 1e-9;

/// Enumeration is refused above this dimension.
const MAX_ENUMERATION_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LcpMethod {
    /// Zero adjustment when raw demand is already feasible, principal pivoting otherwise.
    #[default]
    Auto,
    /// Exhaustive search over supports in increasing bitmask order.
    Enumeration,
    /// Least-index principal pivoting started from the empty support.
    PrincipalPivoting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcpResult {
    pub y: Vec<f64>,
    pub adjusted_demand: Vec<f64>,
    pub adjusted_profit: f64,
}

pub fn lcp_adjust(model: &LinearModel, p: &[f64]) -> Result<LcpResult> {
    lcp_adjust_with(model, p, LcpMethod::Auto)
}

pub fn lcp_adjust_with(model: &LinearModel, p: &[f64], method: LcpMethod) -> Result<LcpResult> {
    check_prices(p, model.dim())?;
    let q = model.raw_demand(p);
    let (y, w) = match method {
        LcpMethod::Auto => {
            if q.iter().all(|&x| x >= 0.0) {
                (vec![0.0; q.len()], q)
            } else {
                let start: Vec<bool> = q.iter().map(|&x| x < 0.0).collect();
                solve_lcp_pivoting(model.b(), &q, &start)?
            }
        }
        LcpMethod::Enumeration => solve_lcp_enumeration(model.b(), &q)?,
        LcpMethod::PrincipalPivoting => solve_lcp_pivoting(model.b(), &q, &vec![false; q.len()])?,
    };
    let adjusted_demand: Vec<f64> = w
        .into_iter()
        .map(|x| if (-REPORT_CLAMP..0.0).contains(&x) { 0.0 } else { x })
        .collect();
    let adjusted_profit = dot(p, &adjusted_demand);
    Ok(LcpResult {
        y,
        adjusted_demand,
        adjusted_profit,
    })
}

fn feasibility_tol(q: &[f64]) -> f64 {
    1e-12 * (1.0 + q.iter().fold(0.0f64, |acc, x| acc.max(x.abs())))
}

/// Solves the LCP restricted to support `s`: `M_ss y_s = -q_s`, `w = q + My`,
/// with `w_s` set to zero.
fn solve_on_support(m: &Matrix, q: &[f64], support: &[bool]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = q.len();
    let idx: Vec<usize> = (0..n).filter(|&i| support[i]).collect();
    let mut y = vec![0.0; n];
    if !idx.is_empty() {
        let rhs: Vec<f64> = idx.iter().map(|&i| -q[i]).collect();
        let ys = m.cholesky_sub(&idx)?.solve(&rhs);
        for (&i, v) in idx.iter().zip(ys) {
            y[i] = v;
        }
    }
    let my = m.mul_vec(&y);
    let w = (0..n)
        .map(|i| if support[i] { 0.0 } else { q[i] + my[i] })
        .collect();
    Some((y, w))
}

/// Least-index principal pivoting (Murty's scheme). Finite for P-matrices
/// from any starting support.
pub fn solve_lcp_pivoting(m: &Matrix, q: &[f64], start: &[bool]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = q.len();
    let tol = feasibility_tol(q);
    let mut support = start.to_vec();
    let cap = 1000 + 100 * n;
    let mut residual = f64::INFINITY;
    for _ in 0..cap {
        let (y, w) = solve_on_support(m, q, &support).ok_or_else(|| {
            PricingError::numerical("principal submatrix is not positive definite", f64::NAN)
        })?;
        let blocking = (0..n).find(|&i| if support[i] { y[i] < -tol } else { w[i] < -tol });
        match blocking {
            None => {
                let y = y.into_iter().map(|v| v.max(0.0)).collect();
                return Ok((y, w));
            }
            Some(i) => {
                residual = if support[i] { -y[i] } else { -w[i] };
                support[i] = !support[i];
            }
        }
    }
    Err(PricingError::numerical(
        format!("principal pivoting did not converge in {cap} pivots"),
        residual,
    ))
}

/// Exact solve by trying every support; the first feasible one in increasing
/// bitmask order is returned.
pub fn solve_lcp_enumeration(m: &Matrix, q: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = q.len();
    if n > MAX_ENUMERATION_DIM {
        return Err(PricingError::Argument(format!(
            "enumeration limited to n <= {MAX_ENUMERATION_DIM}, got {n}"
        )));
    }
    let tol = feasibility_tol(q);
    let mut best_residual = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        let support: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let Some((y, w)) = solve_on_support(m, q, &support) else {
            continue;
        };
        let worst = y.iter().chain(&w).fold(0.0f64, |acc, v| acc.max(-v));
        if worst <= tol {
            let y = y.into_iter().map(|v| v.max(0.0)).collect();
            return Ok((y, w));
        }
        best_residual = best_residual.min(worst);
    }
    Err(PricingError::numerical("no feasible complementary support", best_residual))
}
