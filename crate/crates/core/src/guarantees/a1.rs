use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::linalg::dot;
use crate::market::{DemandModel, MarketInstance};
use crate::optim::log_grid;
use crate::pricing::PersonalizedSolution;

/// Default absolute tolerance on `G(q) <= H(q)`.
pub const A1_TOL: f64 = 1e-9;

/// Tolerance for the P1/P2 sign checks.
pub const P_TOL: f64 = 1e-12;

/// `G` and `H` sampled on a grid of scales `q`.
///
/// `G(q)` is the f-weighted demand at the personalized optimum, keeping only
/// the (product, segment) pairs with `p̄_ij / f_i >= q`. `H(q)` is the
/// f-weighted realized demand at the common price `q f`. A verified profile
/// only says `G <= H` at the sampled points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A1Profile {
    pub grid: Vec<f64>,
    pub g_values: Vec<f64>,
    pub h_values: Vec<f64>,
    /// Sorted distinct ratios `p̄_ij / f_i` where `G` steps down.
    pub breakpoints: Vec<f64>,
    /// Smallest grid `q` with `G(q) > H(q) + tol`.
    pub violation: Option<f64>,
}

impl A1Profile {
    pub fn verified(&self) -> bool {
        self.violation.is_none()
    }

    /// `q,G,H` rows for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,G,H\n");
        for ((q, g), h) in self.grid.iter().zip(&self.g_values).zip(&self.h_values) {
            let _ = writeln!(out, "{q},{g},{h}");
        }
        out
    }
}

pub fn check_a1(market: &MarketInstance, ps: &PersonalizedSolution, f: &[f64], grid_size: usize) -> Result<A1Profile> {
    check_a1_with(market, ps, f, grid_size, A1_TOL)
}

/// Evaluates `G` and `H` on all breakpoints plus `grid_size` log-spaced points
/// over `[q_min/2, q_max]` and the single point `2 q_max`.
pub fn check_a1_with(
    market: &MarketInstance,
    ps: &PersonalizedSolution,
    f: &[f64],
    grid_size: usize,
    tol: f64,
) -> Result<A1Profile> {
    if grid_size < 2 {
        return Err(PricingError::Argument("grid_size must be at least 2".into()));
    }
    if f.len() != market.n() || ps.n() != market.n() || ps.m() != market.m() {
        return Err(PricingError::Dimension { expected: market.n(), got: f.len() });
    }
    if f.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(PricingError::Argument("factor must be positive".into()));
    }

    // (ratio, weight) pairs entering G.
    let mut terms = Vec::with_capacity(market.n() * market.m());
    for (seg, p) in market.segments().iter().zip(&ps.prices) {
        let d = seg.model.realized_demand(p)?;
        for i in 0..market.n() {
            terms.push((p[i] / f[i], seg.theta * f[i] * d[i]));
        }
    }
    let mut breakpoints: Vec<f64> = terms.iter().map(|t| t.0).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();

    let (q_min, q_max) = ps.q_bounds(f);
    let mut grid = log_grid(0.5 * q_min, q_max, grid_size);
    grid.extend_from_slice(&breakpoints);
    // One point past q_max, where every pair is filtered out of G.
    grid.push(2.0 * q_max);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut g_values = Vec::with_capacity(grid.len());
    let mut h_values = Vec::with_capacity(grid.len());
    let mut violation = None;
    for &q in &grid {
        let g: f64 = terms.iter().filter(|t| q <= t.0).map(|t| t.1).sum();
        let price: Vec<f64> = f.iter().map(|x| q * x).collect();
        let mut h = 0.0;
        for seg in market.segments() {
            h += seg.theta * dot(f, &seg.model.realized_demand(&price)?);
        }
        if violation.is_none() && g > h + tol {
            violation = Some(q);
        }
        g_values.push(g);
        h_values.push(h);
    }
    Ok(A1Profile {
        grid,
        g_values,
        h_values,
        breakpoints,
        violation,
    })
}

/// Sufficient conditions for A1 on one segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct P1P2Report {
    /// Cross-price effects are nonnegative (weak substitutes).
    pub p1: bool,
    /// f-weighted demand is nonincreasing in every own price.
    pub p2: bool,
    /// Indices of probe prices where P2 failed (MNL only).
    pub p2_failures: Vec<usize>,
}

/// Linear: P1 iff off-diagonals of `B` are nonpositive, P2 iff `Bf >= 0`.
/// MNL: P1 always holds; P2 holds at `p` iff `d(p)'f <= min_i f_i`.
pub fn check_p1_p2(model: &DemandModel, f: &[f64], probes: &[Vec<f64>]) -> Result<P1P2Report> {
    if f.len() != model.dim() {
        return Err(PricingError::Dimension { expected: model.dim(), got: f.len() });
    }
    if f.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(PricingError::Argument("factor must be positive".into()));
    }
    match model {
        DemandModel::Linear(m) => {
            let p1 = m.has_z_pattern(P_TOL);
            let p2 = m.b().mul_vec(f).iter().all(|&x| x >= -P_TOL);
            Ok(P1P2Report { p1, p2, p2_failures: Vec::new() })
        }
        DemandModel::Mnl(_) => {
            let f_min = f.iter().copied().fold(f64::INFINITY, f64::min);
            let mut p2_failures = Vec::new();
            for (k, p) in probes.iter().enumerate() {
                if dot(&model.demand(p)?, f) > f_min + P_TOL {
                    p2_failures.push(k);
                }
            }
            Ok(P1P2Report {
                p1: true,
                p2: p2_failures.is_empty(),
                p2_failures,
            })
        }
    }
}
