use serde::Serialize;

use super::MarketInstance;
use crate::error::{PricingError, Result};

/// Index space of the bundles a market prices.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleSpace {
    /// Subsets of `base_n` items given by 0/1 incidence vectors.
    Subsets { base_n: usize, items: Vec<Vec<bool>> },
    /// A single good sold in sizes `1..=max_size`.
    Sizes { max_size: usize },
}

impl BundleSpace {
    /// Every non-empty subset of `base_n` items, ordered by bitmask.
    pub fn all_subsets(base_n: usize) -> Result<Self> {
        if base_n == 0 || base_n > 20 {
            return Err(PricingError::Argument(format!(
                "base_n must lie in 1..=20, got {base_n}"
            )));
        }
        let items = (1u32..(1 << base_n))
            .map(|mask| (0..base_n).map(|i| mask >> i & 1 == 1).collect())
            .collect();
        Ok(BundleSpace::Subsets { base_n, items })
    }

    pub fn subsets(items: Vec<Vec<bool>>) -> Result<Self> {
        let base_n = items.first().map(Vec::len).unwrap_or(0);
        if base_n == 0 {
            return Err(PricingError::field("bundles", "no bundles given"));
        }
        for (k, x) in items.iter().enumerate() {
            if x.len() != base_n {
                return Err(PricingError::field(
                    format!("bundles[{k}]"),
                    format!("length {} differs from {base_n}", x.len()),
                ));
            }
            if !x.iter().any(|&b| b) {
                return Err(PricingError::field(format!("bundles[{k}]"), "empty bundle"));
            }
            if items[..k].contains(x) {
                return Err(PricingError::field(format!("bundles[{k}]"), "duplicate bundle"));
            }
        }
        Ok(BundleSpace::Subsets { base_n, items })
    }

    pub fn len(&self) -> usize {
        match self {
            BundleSpace::Subsets { items, .. } => items.len(),
            BundleSpace::Sizes { max_size } => *max_size,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of units in bundle `k`.
    pub fn size(&self, k: usize) -> usize {
        match self {
            BundleSpace::Subsets { items, .. } => items[k].iter().filter(|&&b| b).count(),
            BundleSpace::Sizes { .. } => k + 1,
        }
    }

    pub fn max_size(&self) -> usize {
        (0..self.len()).map(|k| self.size(k)).max().unwrap_or(0)
    }
}

/// A market whose products are bundles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BundleMarket {
    space: BundleSpace,
    inner: MarketInstance,
}

impl BundleMarket {
    pub fn new(space: BundleSpace, inner: MarketInstance) -> Result<Self> {
        if space.len() != inner.n() {
            return Err(PricingError::field(
                "bundles",
                format!("{} bundles but the market prices {} products", space.len(), inner.n()),
            ));
        }
        Ok(BundleMarket { space, inner })
    }

    pub fn space(&self) -> &BundleSpace {
        &self.space
    }

    pub fn market(&self) -> &MarketInstance {
        &self.inner
    }

    pub fn into_market(self) -> MarketInstance {
        self.inner
    }
}

impl std::ops::Deref for BundleMarket {
    type Target = MarketInstance;
    fn deref(&self) -> &MarketInstance {
        &self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_subsets_of_two() {
        let s = BundleSpace::all_subsets(2).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!((0..3).map(|k| s.size(k)).collect::<Vec<_>>(), vec![1, 1, 2]);
    }

    #[test]
    fn rejects_duplicate_and_empty() {
        assert!(BundleSpace::subsets(vec![vec![true, false], vec![true, false]]).is_err());
        assert!(BundleSpace::subsets(vec![vec![false, false]]).is_err());
    }
}
