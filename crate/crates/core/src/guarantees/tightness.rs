use serde::Serialize;

use crate::error::{PricingError, Result};

/// The extremal instance showing `β = 1 + ln ρ` cannot be improved.
///
/// A continuum of customers with willingness to pay in `[1, ρ]` whose tail
/// (the uniform-price demand) is `d(p) = k min(1, 1/p)` on `[0, ρ]` with
/// `k = 1/β`. Charging each customer its valuation earns `∫ d = 1`; any
/// single price in `[1, ρ]` earns `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TightnessReport {
    pub personalized: f64,
    pub uniform: f64,
    pub ratio: f64,
    /// Trapezoid estimate of `∫_0^ρ d(p) dp`, which must equal 1.
    pub tail_integral: f64,
}

pub fn tightness_oracle(rho: f64, integration_steps: usize) -> Result<TightnessReport> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(PricingError::Argument(format!("rho must exceed 1, got {rho}")));
    }
    if integration_steps == 0 {
        return Err(PricingError::Argument("integration_steps must be positive".into()));
    }
    let k = 1.0 / (1.0 + rho.ln());
    let tail = |p: f64| if p <= rho { k * (1.0f64 / p).min(1.0) } else { 0.0 };

    let h = rho / integration_steps as f64;
    let mut integral = 0.5 * (tail(0.0) + tail(rho));
    let mut uniform = 0.0f64;
    for s in 1..integration_steps {
        let p = h * s as f64;
        let d = tail(p);
        integral += d;
        uniform = uniform.max(p * d);
    }
    integral *= h;
    uniform = uniform.max(rho * tail(rho));

    Ok(TightnessReport {
        personalized: 1.0,
        uniform,
        ratio: 1.0 / uniform,
        tail_integral: integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_matches_beta() {
        let e = std::f64::consts::E;
        for (rho, expect) in [(e, 2.0), (e * e, 3.0), (4.0, 1.0 + 4f64.ln())] {
            let r = tightness_oracle(rho, 100_000).unwrap();
            assert!((r.ratio - expect).abs() < 1e-9, "rho {rho}: {r:?}");
            assert!((r.tail_integral - 1.0).abs() < 1e-6, "rho {rho}: {r:?}");
        }
    }

    #[test]
    fn rejects_rho_at_most_one() {
        assert!(tightness_oracle(1.0, 10).is_err());
        assert!(tightness_oracle(0.5, 10).is_err());
        assert!(tightness_oracle(2.0, 0).is_err());
    }
}
