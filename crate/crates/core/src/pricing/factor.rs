use serde::Serialize;

use super::PersonalizedSolution;
use crate::error::{PricingError, Result};
use crate::market::{aggregate_profit, BundleMarket, BundleSpace, MarketInstance};
use crate::optim::grid_then_golden;

/// Search interval for `q` when no personalized solution is supplied.
pub const DEFAULT_Q_BRACKET: (f64, f64) = (1e-4, 1e4);

/// Where to search for the optimal scale `q`.
#[derive(Debug, Clone, Copy)]
pub enum QBracket<'a> {
    /// `DEFAULT_Q_BRACKET`.
    Default,
    /// `[0.5 q_min, 2 q_max]` with `q_min`, `q_max` the extreme ratios `p̄_ij / f_i`.
    Personalized(&'a PersonalizedSolution),
    /// Prices constrained to `q ∈ [lo, hi]`.
    Constrained(f64, f64),
}

#[derive(Debug, Clone)]
pub struct FactorOptions {
    pub grid_points: usize,
    /// Absolute tolerance on `q` for the golden-section refinement.
    pub q_tol: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            grid_points: 2000,
            q_tol: 1e-9,
        }
    }
}

/// Best pricing along the ray `q·f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorResult {
    pub f: Vec<f64>,
    pub q_star: f64,
    pub profit: f64,
    pub q_range: Option<(f64, f64)>,
    /// Interval actually searched.
    pub bracket: (f64, f64),
    /// The optimum sits on the edge of the searched interval.
    pub at_bracket_edge: bool,
}

impl FactorResult {
    pub fn prices(&self) -> Vec<f64> {
        self.f.iter().map(|x| x * self.q_star).collect()
    }
}

pub fn factor_optimize(market: &MarketInstance, f: &[f64], bracket: QBracket<'_>) -> Result<FactorResult> {
    factor_optimize_with(market, f, bracket, &FactorOptions::default())
}

/// Maximizes `q ↦ R(q f)` by a dense log-spaced scan refined with golden section.
pub fn factor_optimize_with(
    market: &MarketInstance,
    f: &[f64],
    bracket: QBracket<'_>,
    opts: &FactorOptions,
) -> Result<FactorResult> {
    check_factor(f, market.n())?;
    let (lo, hi, q_range) = match bracket {
        QBracket::Default => (DEFAULT_Q_BRACKET.0, DEFAULT_Q_BRACKET.1, None),
        QBracket::Personalized(ps) => {
            if ps.n() != f.len() {
                return Err(PricingError::Dimension { expected: f.len(), got: ps.n() });
            }
            let (qmin, qmax) = ps.q_bounds(f);
            (0.5 * qmin, 2.0 * qmax, None)
        }
        QBracket::Constrained(lo, hi) => {
            if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
                return Err(PricingError::Argument(format!(
                    "q range [{lo}, {hi}] must satisfy 0 < lo <= hi < inf"
                )));
            }
            (lo, hi, Some((lo, hi)))
        }
    };
    let profit_at = |q: f64| -> Result<f64> {
        let p: Vec<f64> = f.iter().map(|x| q * x).collect();
        aggregate_profit(market, &p)
    };
    let best = grid_then_golden(profit_at, lo, hi, opts.grid_points, opts.q_tol)?;
    Ok(FactorResult {
        f: f.to_vec(),
        q_star: best.x,
        profit: best.value,
        q_range,
        bracket: (lo, hi),
        at_bracket_edge: best.at_edge && q_range.is_none(),
    })
}

fn check_factor(f: &[f64], n: usize) -> Result<()> {
    if f.len() != n {
        return Err(PricingError::Dimension { expected: n, got: f.len() });
    }
    if let Some(i) = f.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(PricingError::Argument(format!(
            "factor component f[{i}] = {} must be positive",
            f[i]
        )));
    }
    Ok(())
}

/// Which direction a group of segments prices along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Uniform,
    Economic,
    Robust,
}

impl FactorKind {
    pub fn build(self, ps: &PersonalizedSolution) -> Result<Vec<f64>> {
        match self {
            FactorKind::Uniform => Ok(uniform_factor(ps.n())),
            FactorKind::Economic => economic_factor(ps),
            FactorKind::Robust => Ok(robust_factor(ps).f),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FactorKind::Uniform => "uniform",
            FactorKind::Economic => "economic",
            FactorKind::Robust => "robust",
        }
    }
}

impl std::str::FromStr for FactorKind {
    type Err = PricingError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "e" => Ok(FactorKind::Uniform),
            "economic" => Ok(FactorKind::Economic),
            "robust" => Ok(FactorKind::Robust),
            other => Err(PricingError::Argument(format!("unknown factor kind {other:?}"))),
        }
    }
}

pub fn uniform_factor(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

/// `Σ_j α_j p̄^j` with `α_j = θ_j R*_j / R̄`.
pub fn economic_factor(ps: &PersonalizedSolution) -> Result<Vec<f64>> {
    if !(ps.aggregate > 0.0) {
        return Err(PricingError::Degenerate(format!(
            "personalized profit is {}, economic weights undefined",
            ps.aggregate
        )));
    }
    let mut f = vec![0.0; ps.n()];
    for ((p, t), r) in ps.prices.iter().zip(&ps.thetas).zip(&ps.profits) {
        let alpha = t * r / ps.aggregate;
        for (fi, pi) in f.iter_mut().zip(p) {
            *fi += alpha * pi;
        }
    }
    Ok(f)
}

/// Factor minimizing the price spread `ρ`, with the attained `ρ*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustFactor {
    pub f: Vec<f64>,
    pub rho_star: f64,
    /// `p^H_i / p^L_i` per product.
    pub rho_per_product: Vec<f64>,
}

/// Geometric mean of the extreme personalized prices of each product.
pub fn robust_factor(ps: &PersonalizedSolution) -> RobustFactor {
    let n = ps.n();
    let mut f = Vec::with_capacity(n);
    let mut rho_per_product = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = ps
            .prices
            .iter()
            .map(|p| p[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        f.push((lo * hi).sqrt());
        rho_per_product.push(hi / lo);
    }
    let rho_star = rho_per_product.iter().copied().fold(1.0, f64::max);
    RobustFactor {
        f,
        rho_star,
        rho_per_product,
    }
}

/// `ρ(f) = max_ij (p̄_ij/f_i) / min_ij (p̄_ij/f_i)`.
pub fn price_ratio(ps: &PersonalizedSolution, f: &[f64]) -> f64 {
    let (lo, hi) = ps.q_bounds(f);
    hi / lo
}

/// Bundle-size factor `f(x) = g(|x|)`; `g` must be strictly increasing on the
/// sizes present.
pub fn bundle_size_factor(bundles: &BundleMarket, g: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    let space = bundles.space();
    let max = space.max_size();
    let mut prev = f64::NEG_INFINITY;
    for s in 1..=max {
        let v = g(s);
        if !(v.is_finite() && v > 0.0) {
            return Err(PricingError::Argument(format!("g({s}) = {v} must be positive")));
        }
        if v <= prev {
            return Err(PricingError::Argument(format!(
                "g must be strictly increasing: g({s}) = {v} <= g({}) = {prev}",
                s - 1
            )));
        }
        prev = v;
    }
    Ok((0..space.len()).map(|k| g(space.size(k))).collect())
}

/// Component-pricing factor `f(x) = p'x`.
pub fn component_factor(bundles: &BundleMarket, component_prices: &[f64]) -> Result<Vec<f64>> {
    match bundles.space() {
        BundleSpace::Subsets { base_n, items } => {
            check_factor(component_prices, *base_n)?;
            Ok(items
                .iter()
                .map(|x| {
                    x.iter()
                        .zip(component_prices)
                        .filter(|(b, _)| **b)
                        .map(|(_, p)| p)
                        .sum()
                })
                .collect())
        }
        BundleSpace::Sizes { .. } => Err(PricingError::Argument(
            "component pricing needs item-level bundles".into(),
        )),
    }
}
