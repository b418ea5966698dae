//! Multi-product pricing with single-factor heuristics and worst-case
//! guarantees relative to personalized pricing.
//!
//! A [`market::MarketInstance`] holds weighted customer segments, each with
//! its own demand model. [`pricing::personalized_optimize`] prices every
//! segment separately; [`pricing::factor_optimize`] restricts all segments to
//! one price ray `q·f`. The [`guarantees`] module bounds the loss from doing
//! so by `β = 1 + ln(q_max/q_min)`, and [`clustering`] groups segments so each
//! group gets its own, tighter, ray.

pub mod bench;
pub mod cli;
pub mod clustering;
pub mod error;
pub mod guarantees;
pub mod linalg;
pub mod market;
pub mod optim;
pub mod pricing;

pub use error::{PricingError, Result};
