//! Performance guarantees of single-factor pricing relative to personalized
//! pricing, and numerical checks of the conditions they rest on.

mod a1;
mod bound;
mod tightness;

pub use a1::{check_a1, check_a1_with, check_p1_p2, A1Profile, P1P2Report, A1_TOL, P_TOL};
pub use bound::{
    beta_from_rho, compute_bound, constrained_beta, finite_set_beta, nonlinear_pricing_beta, A1Status,
    BoundReport,
};
pub use tightness::{tightness_oracle, TightnessReport};
