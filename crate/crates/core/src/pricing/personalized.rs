use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::market::{DemandModel, MarketInstance, MnlSegmentModel};

/// Upper limit for the MNL markup bracket.
pub const MAX_MARKUP: f64 = 1e6;


/// Optimal prices and profits when each segment is priced separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersonalizedSolution {
    /// `prices[j]` is the optimal price vector of segment `j`.
    pub prices: Vec<Vec<f64>>,
    pub profits: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `Σ θ_j R*_j`.
    pub aggregate: f64,
}

impl PersonalizedSolution {
    pub fn new(prices: Vec<Vec<f64>>, profits: Vec<f64>, thetas: Vec<f64>) -> Result<Self> {
        let m = prices.len();
        if m == 0 || profits.len() != m || thetas.len() != m {
            return Err(PricingError::Argument(
                "prices, profits and weights must have one entry per segment".into(),
            ));
        }
        let n = prices[0].len();
        for (j, p) in prices.iter().enumerate() {
            if p.len() != n {
                return Err(PricingError::Dimension { expected: n, got: p.len() });
            }
            if let Some(i) = p.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(PricingError::A0Violation(format!(
                    "optimal price p[{j}][{i}] = {} is not positive and finite",
                    p[i]
                )));
            }
        }
        let aggregate = thetas.iter().zip(&profits).map(|(t, r)| t * r).sum();
        Ok(PersonalizedSolution {
            prices,
            profits,
            thetas,
            aggregate,
        })
    }

    pub fn m(&self) -> usize {
        self.prices.len()
    }

    pub fn n(&self) -> usize {
        self.prices[0].len()
    }

    /// `(min, max)` of `p̄_ij / f_i` over all products and segments.
    pub fn q_bounds(&self, f: &[f64]) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.prices {
            for (x, fi) in p.iter().zip(f) {
                let q = x / fi;
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
        (lo, hi)
    }

    /// Restriction to a subset of segments with weights renormalized.
    pub fn restrict(&self, members: &[usize]) -> Result<Self> {
        let total: f64 = members.iter().map(|&j| self.thetas[j]).sum();
        Self::new(
            members.iter().map(|&j| self.prices[j].clone()).collect(),
            members.iter().map(|&j| self.profits[j]).collect(),
            members.iter().map(|&j| self.thetas[j] / total).collect(),
        )
    }
}

/// Optimal price vector for every segment.
///
/// Linear segments use the closed form `0.5 B⁻¹a`. MNL segments are optimal
/// on the family `p_i = 1/b_i + m`, so the markup `m` is found by a 1-D root search.
pub fn personalized_optimize(market: &MarketInstance) -> Result<PersonalizedSolution> {
    let mut prices = Vec::with_capacity(market.m());
    let mut profits = Vec::with_capacity(market.m());
    for seg in market.segments() {
        let p = match &seg.model {
            DemandModel::Linear(m) => m.optimal()?.0,
            DemandModel::Mnl(m) => mnl_optimal(m)?.0,
        };
        profits.push(seg.model.profit(&p)?);
        prices.push(p);
    }
    PersonalizedSolution::new(prices, profits, market.thetas())
}

/// Returns the optimal prices and markup of one MNL segment.
///
/// The optimal markup is the unique root of
/// `ln m = ln Σ_i exp(a_i - 1 - b_i m) / b_i`, found by bisection in a
/// log-domain form that stays finite for large utilities.
pub(crate) fn mnl_optimal(model: &MnlSegmentModel) -> Result<(Vec<f64>, f64)> {
    let gap = |m: f64| {
        let terms: Vec<f64> = model
            .a()
            .iter()
            .zip(model.b())
            .map(|(a, b)| a - 1.0 - b * m - b.ln())
            .collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
        m.ln() - lse
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    while gap(lo) > 0.0 {
        lo /= 2.0;
        if lo < 1e-300 {
            return Err(PricingError::numerical("markup root below representable range", lo));
        }
    }
    while gap(hi) < 0.0 {
        hi *= 2.0;
        if hi > MAX_MARKUP {
            return Err(PricingError::numerical("markup search exceeded bracket limit", hi));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let markup = 0.5 * (lo + hi);
    if !markup.is_finite() {
        return Err(PricingError::numerical("markup is not finite", markup));
    }
    Ok((model.markup_prices(markup), markup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::market::{LinearModel, Segment};

    #[test]
    fn linear_closed_form() {
        let b = Matrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let m = MarketInstance::new(vec![Segment::new(1.0, LinearModel::new(vec![1.0, 1.0], b).unwrap())]).unwrap();
        let ps = personalized_optimize(&m).unwrap();
        assert!((ps.prices[0][0] - 0.5).abs() < 1e-15 && (ps.prices[0][1] - 0.5).abs() < 1e-15);
        assert!((ps.aggregate - 0.5).abs() < 1e-15);

        let m = MarketInstance::new(vec![Segment::new(1.0, LinearModel::new(vec![1.0], Matrix::identity(1)).unwrap())]).unwrap();
        let ps = personalized_optimize(&m).unwrap();
        assert_eq!(ps.prices[0], vec![0.5]);
        assert!((ps.aggregate - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mnl_markup_equals_optimal_profit() {
        // Stationarity gives p_i - 1/b_i = R* for every product.
        let m = MnlSegmentModel::new(vec![1.0, 0.2, -0.5], vec![0.5, 1.5, 2.0]).unwrap();
        let (p, markup) = mnl_optimal(&m).unwrap();
        let r = DemandModel::Mnl(m).profit(&p).unwrap();
        assert!((markup - r).abs() < 1e-13, "markup {markup} profit {r}");
    }

    #[test]
    fn rejects_nonpositive_prices() {
        let err = PersonalizedSolution::new(vec![vec![0.0]], vec![0.0], vec![1.0]).unwrap_err();
        assert!(matches!(err, PricingError::A0Violation(_)));
    }
}
