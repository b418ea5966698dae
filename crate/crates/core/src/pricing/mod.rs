//! Personalized optimization, single-factor search and factor construction.

mod factor;
mod heuristic;
mod personalized;

pub use factor::{
    bundle_size_factor, component_factor, economic_factor, factor_optimize, factor_optimize_with,
    price_ratio, robust_factor, FactorKind, uniform_factor, FactorOptions, FactorResult, QBracket, RobustFactor,
    DEFAULT_Q_BRACKET,
};
pub use heuristic::{nonpersonalized_heuristic, HeuristicResult};
pub use personalized::{personalized_optimize, PersonalizedSolution, MAX_MARKUP};
