use serde::Serialize;

use super::{economic_factor, factor_optimize, uniform_factor, PersonalizedSolution, QBracket};
use crate::error::{PricingError, Result};
use crate::linalg::Matrix;
use crate::market::{aggregate_profit, MarketInstance, MAX_PRICE};
use crate::optim::{nelder_mead_max, NelderMeadOptions};

/// Segments whose personalized prices seed the MNL local search; with the
/// two factor solutions that makes five starts.
const SEGMENT_STARTS: usize = 3;

/// A common (non-personalized) price vector and its realized profit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicResult {
    pub prices: Vec<f64>,
    pub profit: f64,
}

/// Non-personalized multi-price baseline. Not an optimum.
///
/// Linear markets price at `0.5 B̄⁻¹ā` for the θ-averaged model and realize
/// LCP-adjusted profits. MNL markets run Nelder–Mead from the personalized
/// prices of the first three segments and from the economic- and
/// uniform-factor solutions, keeping the best.
pub fn nonpersonalized_heuristic(market: &MarketInstance, ps: &PersonalizedSolution) -> Result<HeuristicResult> {
    if market.is_linear() {
        linear_heuristic(market)
    } else if market.is_mnl() {
        mnl_heuristic(market, ps)
    } else {
        Err(PricingError::Argument(
            "non-personalized heuristic needs a single model family".into(),
        ))
    }
}

fn linear_heuristic(market: &MarketInstance) -> Result<HeuristicResult> {
    let n = market.n();
    let mut a = vec![0.0; n];
    for s in market.segments() {
        let m = s.model.as_linear().expect("checked linear");
        for (ai, x) in a.iter_mut().zip(m.a()) {
            *ai += s.theta * x;
        }
    }
    let b = Matrix::weighted_sum(
        market
            .segments()
            .iter()
            .map(|s| (s.theta, s.model.as_linear().expect("checked linear").b())),
    )
    .expect("segments share a dimension");
    let chol = b
        .cholesky()
        .ok_or_else(|| PricingError::numerical("averaged B is not positive definite", 0.0))?;
    let prices: Vec<f64> = chol.solve(&a).into_iter().map(|u| 0.5 * u).collect();
    let profit = aggregate_profit(market, &prices)?;
    Ok(HeuristicResult { prices, profit })
}

fn mnl_heuristic(market: &MarketInstance, ps: &PersonalizedSolution) -> Result<HeuristicResult> {
    let n = market.n();
    let mut starts: Vec<Vec<f64>> = ps.prices.iter().take(SEGMENT_STARTS).cloned().collect();
    if let Ok(f) = economic_factor(ps) {
        starts.push(factor_optimize(market, &f, QBracket::Personalized(ps))?.prices());
    }
    let e = uniform_factor(n);
    starts.push(factor_optimize(market, &e, QBracket::Personalized(ps))?.prices());

    let objective = |x: &[f64]| {
        let p: Vec<f64> = x.iter().map(|v| v.clamp(0.0, MAX_PRICE)).collect();
        aggregate_profit(market, &p).unwrap_or(f64::NEG_INFINITY)
    };
    let opts = NelderMeadOptions {
        max_evals: 400 * (n + 1),
        ..NelderMeadOptions::default()
    };
    let mut best: Option<HeuristicResult> = None;
    for start in &starts {
        let (x, _) = nelder_mead_max(objective, start, &opts);
        let prices: Vec<f64> = x.iter().map(|v| v.clamp(0.0, MAX_PRICE)).collect();
        let profit = aggregate_profit(market, &prices)?;
        if best.as_ref().is_none_or(|b| profit > b.profit) {
            best = Some(HeuristicResult { prices, profit });
        }
    }
    Ok(best.expect("at least one start"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{LinearModel, MnlSegmentModel, Segment};
    use crate::pricing::personalized_optimize;

    #[test]
    fn two_segment_linear() {
        let seg = |a: f64| LinearModel::new(vec![a], Matrix::identity(1)).unwrap().into();
        let m = MarketInstance::from_weights(&[1.0, 1.0], vec![seg(1.0), seg(2.0)]).unwrap();
        let ps = personalized_optimize(&m).unwrap();
        let h = nonpersonalized_heuristic(&m, &ps).unwrap();
        assert!((h.prices[0] - 0.75).abs() < 1e-15);
        assert!((h.profit - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn single_mnl_segment_recovers_personalized() {
        let model = MnlSegmentModel::new(vec![0.5, -0.2], vec![1.0, 1.7]).unwrap();
        let m = MarketInstance::new(vec![Segment::new(1.0, model)]).unwrap();
        let ps = personalized_optimize(&m).unwrap();
        let h = nonpersonalized_heuristic(&m, &ps).unwrap();
        assert!((h.profit - ps.aggregate).abs() < 1e-6);
    }
}
