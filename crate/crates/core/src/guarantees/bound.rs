use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::pricing::{FactorResult, PersonalizedSolution};

use super::A1Profile;

/// Outcome of checking A1 for the factor a bound was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "q")]
pub enum A1Status {
    VerifiedOnGrid,
    ViolatedAt(f64),
    NotChecked,
}

impl std::fmt::Display for A1Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            A1Status::VerifiedOnGrid => write!(f, "verified-on-grid"),
            A1Status::ViolatedAt(q) => write!(f, "violated-at-q={q}"),
            A1Status::NotChecked => write!(f, "not-checked"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub q_min: f64,
    pub q_max: f64,
    pub rho: f64,
    /// `1 + ln(rho)`.
    pub beta: f64,
    pub a1_verified: A1Status,
    /// `R̄ / R^f`, when a factor solution was supplied.
    pub guarantee_ratio_observed: Option<f64>,
}

impl BoundReport {
    pub fn with_a1(mut self, profile: &A1Profile) -> Self {
        self.a1_verified = match profile.violation {
            Some(q) => A1Status::ViolatedAt(q),
            None => A1Status::VerifiedOnGrid,
        };
        self
    }

    /// The bound `R̄ <= β R^f` can be relied on (A1 verified on the grid).
    pub fn certified(&self) -> bool {
        self.a1_verified == A1Status::VerifiedOnGrid
    }
}

pub fn beta_from_rho(rho: f64) -> f64 {
    1.0 + rho.ln()
}

/// Spread of the personalized prices along `f` and the resulting `β`.
pub fn compute_bound(
    ps: &PersonalizedSolution,
    f: &[f64],
    factor: Option<&FactorResult>,
) -> Result<BoundReport> {
    if f.len() != ps.n() {
        return Err(PricingError::Dimension { expected: ps.n(), got: f.len() });
    }
    if let Some(i) = f.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(PricingError::Argument(format!("factor component f[{i}] must be positive")));
    }
    for (j, p) in ps.prices.iter().enumerate() {
        if let Some(i) = p.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(PricingError::A0Violation(format!("p[{j}][{i}] = {}", p[i])));
        }
    }
    let (q_min, q_max) = ps.q_bounds(f);
    let rho = q_max / q_min;
    Ok(BoundReport {
        q_min,
        q_max,
        rho,
        beta: beta_from_rho(rho),
        a1_verified: A1Status::NotChecked,
        guarantee_ratio_observed: factor.map(|r| ps.aggregate / r.profit),
    })
}

/// `β = 1 + k` when prices are constrained to `[q_min f, e^k q_min f]`.
pub fn constrained_beta(k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(PricingError::Argument(format!("k must be positive, got {k}")));
    }
    Ok(1.0 + k)
}

/// Sharpened bound `Σ_k (q_k - q_{k+1}) / q_k` for a finite, strictly
/// decreasing set of allowed scales (with `q_{K+1} = 0`).
pub fn finite_set_beta(q: &[f64]) -> Result<f64> {
    if q.is_empty() {
        return Err(PricingError::Argument("empty price set".into()));
    }
    if q.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(PricingError::Argument("scales must be positive and finite".into()));
    }
    if let Some(k) = q.windows(2).position(|w| w[1] >= w[0]) {
        return Err(PricingError::Argument(format!(
            "scales must be strictly decreasing: q[{}] = {} >= q[{k}] = {}",
            k + 1,
            q[k + 1],
            q[k]
        )));
    }
    Ok(q
        .iter()
        .enumerate()
        .map(|(k, qk)| (qk - q.get(k + 1).copied().unwrap_or(0.0)) / qk)
        .sum())
}

/// `β = 1 + ln(n v_1 / v_n)` for linear versus non-linear pricing of bundle
/// sizes `1..=n`, where `v` (gross utility per bundle size) is increasing and
/// `v_i / i` is decreasing.
pub fn nonlinear_pricing_beta(v: &[f64]) -> Result<f64> {
    let n = v.len();
    if n == 0 {
        return Err(PricingError::Argument("empty utility vector".into()));
    }
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(PricingError::Argument("utilities must be positive".into()));
    }
    for i in 1..n {
        if v[i] < v[i - 1] {
            return Err(PricingError::Argument(format!("v is not increasing at size {}", i + 1)));
        }
        if v[i] / (i + 1) as f64 > v[i - 1] / i as f64 {
            return Err(PricingError::Argument(format!(
                "v_i / i is not decreasing at size {}",
                i + 1
            )));
        }
    }
    Ok(1.0 + (n as f64 * v[0] / v[n - 1]).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(prices: Vec<Vec<f64>>) -> PersonalizedSolution {
        let m = prices.len();
        PersonalizedSolution::new(prices, vec![1.0; m], vec![1.0 / m as f64; m]).unwrap()
    }

    #[test]
    fn preview_example_about_three() {
        let h = 0.37;
        let r = compute_bound(&ps(vec![vec![h], vec![7.38 * h]]), &[1.0], None).unwrap();
        assert!((r.rho - 7.38).abs() < 1e-12);
        assert!((r.beta - (1.0 + 7.38f64.ln())).abs() < 1e-12);
        assert!((r.beta - 3.0).abs() < 2e-3);
        assert_eq!(r.a1_verified, A1Status::NotChecked);
    }

    #[test]
    fn identical_types_give_unit_beta() {
        let p = vec![1.0, 2.5];
        let r = compute_bound(&ps(vec![p.clone(), p.clone()]), &p, None).unwrap();
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.beta, 1.0);
    }

    #[test]
    fn mixed_bundle_example() {
        // Bundle prices (e1, e2, e1+e2) = (1, 2, 2.5) along sizes (1, 1, 2).
        let r = compute_bound(&ps(vec![vec![1.0, 2.0, 2.5]]), &[1.0, 1.0, 2.0], None).unwrap();
        assert_eq!((r.q_min, r.q_max), (1.0, 2.0));
        assert!((r.beta - (1.0 + 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn a0_and_argument_errors() {
        let bad = PersonalizedSolution {
            prices: vec![vec![0.0]],
            profits: vec![1.0],
            thetas: vec![1.0],
            aggregate: 1.0,
        };
        assert!(matches!(compute_bound(&bad, &[1.0], None), Err(PricingError::A0Violation(_))));
        assert!(compute_bound(&ps(vec![vec![1.0]]), &[0.0], None).is_err());
    }

    #[test]
    fn constrained_examples() {
        assert_eq!(constrained_beta(2.0).unwrap(), 3.0);
        assert!((constrained_beta(2f64.ln()).unwrap() - 1.6931471805599454).abs() < 1e-15);
        assert!((constrained_beta(1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(constrained_beta(0.0).is_err());
        assert!(constrained_beta(-1.0).is_err());
    }

    #[test]
    fn finite_set_examples() {
        assert_eq!(finite_set_beta(&[2.0, 1.0]).unwrap(), 1.5);
        assert_eq!(finite_set_beta(&[1.0]).unwrap(), 1.0);
        assert_eq!(finite_set_beta(&[4.0, 2.0, 1.0]).unwrap(), 2.0);
        assert!(finite_set_beta(&[1.0, 2.0]).is_err());
        assert!(finite_set_beta(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn nonlinear_examples() {
        assert!((nonlinear_pricing_beta(&[1.0, 1.5]).unwrap() - (1.0 + (4.0f64 / 3.0).ln())).abs() < 1e-15);
        assert_eq!(nonlinear_pricing_beta(&[3.0]).unwrap(), 1.0);
        assert!(nonlinear_pricing_beta(&[1.0, 0.5]).is_err());
        assert!(nonlinear_pricing_beta(&[1.0, 3.0]).is_err());
    }

    #[test]
    fn nonlinear_harmonic_prefix() {
        // v_i = H_i; H_10 = 7381/2520.
        let v: Vec<f64> = (1..=10)
            .scan(0.0, |s, k| {
                *s += 1.0 / k as f64;
                Some(*s)
            })
            .collect();
        assert!((v[9] - 7381.0 / 2520.0).abs() < 1e-14);
        let beta = nonlinear_pricing_beta(&v).unwrap();
        assert!((beta - (1.0 + (25200.0f64 / 7381.0).ln())).abs() < 1e-14);
        assert!((beta - 2.228).abs() < 5e-4);
    }
}
