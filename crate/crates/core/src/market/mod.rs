//! Market instances, demand models and the linear-complementarity adjustment.

mod bundle;
pub mod io;
mod lcp;
mod linear;
mod mnl;

pub use bundle::{BundleMarket, BundleSpace};
pub use lcp::{lcp_adjust, lcp_adjust_with, solve_lcp_enumeration, solve_lcp_pivoting, LcpMethod, LcpResult};
pub use linear::LinearModel;
pub use mnl::MnlSegmentModel;

use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::linalg::{dot, Matrix};

/// Prices above this are rejected before evaluating any model.
pub const MAX_PRICE: f64 = 1e9;

/// Tolerance on `Σ θ_j = 1`.
pub const THETA_SUM_TOL: f64 = 1e-12;

/// Demand of one customer segment as a function of the price vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DemandModel {
    Linear(LinearModel),
    Mnl(MnlSegmentModel),
}

impl DemandModel {
    pub fn dim(&self) -> usize {
        match self {
            DemandModel::Linear(m) => m.dim(),
            DemandModel::Mnl(m) => m.dim(),
        }
    }

    /// Raw demand `d(p)`. Linear demand is `a - Bp` and may be negative.
    pub fn demand(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_prices(p, self.dim())?;
        Ok(match self {
            DemandModel::Linear(m) => m.raw_demand(p),
            DemandModel::Mnl(m) => m.demand_unchecked(p),
        })
    }

    /// Analytic Jacobian, entry `(i, k)` is `∂d_i/∂p_k`.
    pub fn jacobian(&self, p: &[f64]) -> Result<Matrix> {
        check_prices(p, self.dim())?;
        Ok(match self {
            DemandModel::Linear(m) => m.jacobian(),
            DemandModel::Mnl(m) => m.jacobian_unchecked(p),
        })
    }

    /// Demand the firm actually realizes at `p`: LCP-adjusted for linear models.
    pub fn realized_demand(&self, p: &[f64]) -> Result<Vec<f64>> {
        match self {
            DemandModel::Linear(m) => Ok(lcp_adjust(m, p)?.adjusted_demand),
            DemandModel::Mnl(_) => self.demand(p),
        }
    }

    /// Realized profit `p'd`, LCP-adjusted for linear models.
    pub fn profit(&self, p: &[f64]) -> Result<f64> {
        match self {
            DemandModel::Linear(m) => Ok(lcp_adjust(m, p)?.adjusted_profit),
            DemandModel::Mnl(m) => {
                check_prices(p, m.dim())?;
                Ok(dot(p, &m.demand_unchecked(p)))
            }
        }
    }

    pub fn as_linear(&self) -> Option<&LinearModel> {
        match self {
            DemandModel::Linear(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_mnl(&self) -> Option<&MnlSegmentModel> {
        match self {
            DemandModel::Mnl(m) => Some(m),
            _ => None,
        }
    }
}

impl From<LinearModel> for DemandModel {
    fn from(m: LinearModel) -> Self {
        DemandModel::Linear(m)
    }
}

impl From<MnlSegmentModel> for DemandModel {
    fn from(m: MnlSegmentModel) -> Self {
        DemandModel::Mnl(m)
    }
}

/// Per-segment realized profit.
pub fn segment_profit(model: &DemandModel, p: &[f64]) -> Result<f64> {
    model.profit(p)
}

/// θ-weighted realized profit over all segments.
pub fn aggregate_profit(market: &MarketInstance, p: &[f64]) -> Result<f64> {
    market
        .segments
        .iter()
        .map(|s| Ok(s.theta * s.model.profit(p)?))
        .sum()
}

/// A customer segment: its population share and demand model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub theta: f64,
    pub model: DemandModel,
}

impl Segment {
    pub fn new(theta: f64, model: impl Into<DemandModel>) -> Self {
        Segment {
            theta,
            model: model.into(),
        }
    }
}

/// `n` products sold to `m` weighted customer segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketInstance {
    n: usize,
    segments: Vec<Segment>,
    labels: Option<Vec<String>>,
}

impl MarketInstance {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        Self::with_labels(segments, None)
    }

    pub fn with_labels(segments: Vec<Segment>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| PricingError::field("segments", "at least one segment is required"))?;
        let n = first.model.dim();
        if n == 0 {
            return Err(PricingError::field("n", "must be at least 1"));
        }
        let mut total = 0.0;
        for (j, s) in segments.iter().enumerate() {
            if !(s.theta > 0.0 && s.theta <= 1.0) {
                return Err(PricingError::field(
                    format!("segments[{j}].theta"),
                    format!("{} is outside (0, 1]", s.theta),
                ));
            }
            if s.model.dim() != n {
                return Err(PricingError::field(
                    format!("segments[{j}]"),
                    format!("model has dimension {}, expected {n}", s.model.dim()),
                ));
            }
            total += s.theta;
        }
        if (total - 1.0).abs() > THETA_SUM_TOL {
            return Err(PricingError::field(
                "segments[].theta",
                format!("weights sum to {total}, expected 1"),
            ));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(PricingError::field(
                    "labels",
                    format!("{} labels for {n} products", l.len()),
                ));
            }
        }
        Ok(MarketInstance {
            n,
            segments,
            labels,
        })
    }

    /// Builds a market from unnormalized positive weights.
    pub fn from_weights(weights: &[f64], models: Vec<DemandModel>) -> Result<Self> {
        if weights.len() != models.len() {
            return Err(PricingError::Dimension {
                expected: models.len(),
                got: weights.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(PricingError::field("theta", "weights must be positive"));
        }
        let segments = weights
            .iter()
            .zip(models)
            .map(|(w, model)| Segment {
                theta: w / total,
                model,
            })
            .collect();
        Self::new(segments)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.theta).collect()
    }

    pub fn is_linear(&self) -> bool {
        self.segments.iter().all(|s| s.model.as_linear().is_some())
    }

    pub fn is_mnl(&self) -> bool {
        self.segments.iter().all(|s| s.model.as_mnl().is_some())
    }

    /// Sub-market over the given segments with weights renormalized.
    pub fn sub_market(&self, members: &[usize]) -> Result<Self> {
        let weights: Vec<f64> = members.iter().map(|&j| self.segments[j].theta).collect();
        let models = members
            .iter()
            .map(|&j| self.segments[j].model.clone())
            .collect();
        let mut sub = Self::from_weights(&weights, models)?;
        sub.labels = self.labels.clone();
        Ok(sub)
    }

    /// Same market with segments listed in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let segments = order.iter().map(|&j| self.segments[j].clone()).collect();
        Self::with_labels(segments, self.labels.clone())
    }
}

pub(crate) fn check_prices(p: &[f64], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(PricingError::Dimension {
            expected: n,
            got: p.len(),
        });
    }
    for (i, &x) in p.iter().enumerate() {
        if !x.is_finite() {
            return Err(PricingError::Price(format!("p[{i}] = {x} is not finite")));
        }
        if x < 0.0 {
            return Err(PricingError::Price(format!("p[{i}] = {x} is negative")));
        }
        if x > MAX_PRICE {
            return Err(PricingError::Price(format!("p[{i}] = {x} exceeds {MAX_PRICE:e}")));
        }
    }
    Ok(())
}
