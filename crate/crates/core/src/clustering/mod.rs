//! Grouping segments so that each group prices along its own factor.
//!
//! Segments are compared by the Chebyshev distance between log price vectors,
//! `max_i |ln p̄_ij - ln p̄_il|`. The diameter of a group under this metric is
//! exactly `ln ρ*` of the group, so minimizing the largest diameter minimizes
//! the worst per-group guarantee.

mod kmeans;

pub use kmeans::{kmeans_cluster, kmeans_trace, KMeansOptions, KMeansTrace};

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::market::MarketInstance;
use crate::pricing::{economic_factor, factor_optimize, robust_factor, FactorKind, FactorResult, PersonalizedSolution, QBracket};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub members: Vec<usize>,
    pub rho_star: f64,
    pub robust_f: Vec<f64>,
    pub economic_f: Vec<f64>,
}

/// Assignment of segments to clusters `0..K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterPartition {
    pub assignment: Vec<usize>,
    pub clusters: Vec<Cluster>,
    /// Largest `ρ*` over clusters.
    pub worst_rho: f64,
}

impl ClusterPartition {
    /// Builds per-cluster factors from an assignment; clusters must be nonempty.
    pub fn from_assignment(ps: &PersonalizedSolution, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != ps.m() {
            return Err(PricingError::Dimension { expected: ps.m(), got: assignment.len() });
        }
        let k = assignment.iter().max().map_or(0, |c| c + 1);
        let mut members = vec![Vec::new(); k];
        for (j, &c) in assignment.iter().enumerate() {
            members[c].push(j);
        }
        if let Some(c) = members.iter().position(Vec::is_empty) {
            return Err(PricingError::Argument(format!("cluster {c} is empty")));
        }
        let mut clusters = Vec::with_capacity(k);
        for members in members {
            let sub = ps.restrict(&members)?;
            let robust = robust_factor(&sub);
            clusters.push(Cluster {
                economic_f: economic_factor(&sub)?,
                robust_f: robust.f,
                rho_star: robust.rho_star,
                members,
            });
        }
        let worst_rho = clusters.iter().map(|c| c.rho_star).fold(1.0, f64::max);
        Ok(ClusterPartition {
            assignment,
            clusters,
            worst_rho,
        })
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    /// `segment_id,cluster_id` rows, a blank line, then one summary row per cluster.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("segment_id,cluster_id\n");
        for (j, c) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{j},{c}");
        }
        out.push_str("\ncluster_id,size,rho_star,beta\n");
        for (c, cl) in self.clusters.iter().enumerate() {
            let _ = writeln!(out, "{c},{},{},{}", cl.members.len(), cl.rho_star, 1.0 + cl.rho_star.ln());
        }
        out
    }
}

/// `max_i |ln p̄_ij - ln p̄_il|`.
pub fn log_ratio_distance(ps: &PersonalizedSolution, j: usize, l: usize) -> Result<f64> {
    let (pj, pl) = (&ps.prices[j], &ps.prices[l]);
    let mut d = 0.0f64;
    for (i, (a, b)) in pj.iter().zip(pl).enumerate() {
        if !(*a > 0.0 && *b > 0.0) {
            return Err(PricingError::A0Violation(format!(
                "nonpositive price for product {i} in segment {}",
                if *a > 0.0 { l } else { j }
            )));
        }
        d = d.max((a.ln() - b.ln()).abs());
    }
    Ok(d)
}

fn check_k(ps: &PersonalizedSolution, k: usize) -> Result<()> {
    if k == 0 || k > ps.m() {
        return Err(PricingError::Argument(format!("K must lie in 1..={}, got {k}", ps.m())));
    }
    Ok(())
}

/// Farthest-point-first (Gonzalez). The first center is segment 0; each next
/// center is the segment farthest from the current centers. Segments join the
/// nearest center. All ties go to the smallest index.
pub fn fpf_cluster(ps: &PersonalizedSolution, k: usize) -> Result<ClusterPartition> {
    check_k(ps, k)?;
    let m = ps.m();
    let mut centers = vec![0usize];
    let mut nearest = vec![0usize; m];
    let mut dist: Vec<f64> = (0..m).map(|j| log_ratio_distance(ps, j, 0)).collect::<Result<_>>()?;
    while centers.len() < k {
        let mut next = 0;
        for j in 1..m {
            if dist[j] > dist[next] {
                next = j;
            }
        }
        if dist[next] == 0.0 {
            // Remaining segments coincide with centers; promote the first non-center.
            next = (0..m).find(|j| !centers.contains(j)).expect("k <= m");
        }
        let c = centers.len();
        centers.push(next);
        nearest[next] = c;
        dist[next] = 0.0;
        for j in 0..m {
            let d = log_ratio_distance(ps, j, next)?;
            if d < dist[j] {
                dist[j] = d;
                nearest[j] = c;
            }
        }
    }
    ClusterPartition::from_assignment(ps, nearest)
}

/// Profit when each cluster prices along its own factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteredProfit {
    /// `Σ_k (cluster weight) × (cluster factor profit)` in original θ units.
    pub profit: f64,
    pub per_cluster: Vec<FactorResult>,
}

pub fn clustered_factor_profit(
    market: &MarketInstance,
    ps: &PersonalizedSolution,
    partition: &ClusterPartition,
    kind: FactorKind,
) -> Result<ClusteredProfit> {
    let mut profit = 0.0;
    let mut per_cluster = Vec::with_capacity(partition.k());
    for cl in &partition.clusters {
        let weight: f64 = cl.members.iter().map(|&j| ps.thetas[j]).sum();
        let sub_market = market.sub_market(&cl.members)?;
        let sub_ps = ps.restrict(&cl.members)?;
        let f = match kind {
            FactorKind::Economic => cl.economic_f.clone(),
            FactorKind::Robust => cl.robust_f.clone(),
            FactorKind::Uniform => kind.build(&sub_ps)?,
        };
        let r = factor_optimize(&sub_market, &f, QBracket::Personalized(&sub_ps))?;
        profit += weight * r.profit;
        per_cluster.push(r);
    }
    Ok(ClusteredProfit { profit, per_cluster })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn ps1(prices: &[f64]) -> PersonalizedSolution {
        let m = prices.len();
        PersonalizedSolution::new(
            prices.iter().map(|&p| vec![p]).collect(),
            prices.iter().map(|p| p * p).collect(),
            vec![1.0 / m as f64; m],
        )
        .unwrap()
    }

    #[test]
    fn distance_examples() {
        let ps = ps1(&[1.0, 4.0, 1.0]);
        assert_eq!(log_ratio_distance(&ps, 0, 2).unwrap(), 0.0);
        assert!((log_ratio_distance(&ps, 0, 1).unwrap() - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn fpf_four_segment_example() {
        let ps = ps1(&[1.0, 1.1, E, 1.1 * E]);
        let p = fpf_cluster(&ps, 2).unwrap();
        assert_eq!(p.assignment, vec![0, 0, 1, 1]);
        assert!((p.worst_rho - 1.1).abs() < 1e-12);
    }

    #[test]
    fn fpf_extremes() {
        let ps = ps1(&[1.0, 2.0, 3.0, 5.0]);
        let all = fpf_cluster(&ps, 4).unwrap();
        assert_eq!(all.worst_rho, 1.0);
        assert_eq!(all.k(), 4);
        let one = fpf_cluster(&ps, 1).unwrap();
        assert_eq!(one.worst_rho, 5.0);
        assert!(fpf_cluster(&ps, 0).is_err());
        assert!(fpf_cluster(&ps, 5).is_err());
    }

    #[test]
    fn fpf_with_duplicate_segments() {
        let ps = ps1(&[2.0, 2.0, 2.0]);
        let p = fpf_cluster(&ps, 3).unwrap();
        assert_eq!(p.assignment, vec![0, 1, 2]);
    }

    #[test]
    fn partition_csv() {
        let ps = ps1(&[1.0, 1.1, E, 1.1 * E]);
        let csv = fpf_cluster(&ps, 2).unwrap().to_csv();
        assert!(csv.starts_with("segment_id,cluster_id\n0,0\n1,0\n2,1\n3,1\n\ncluster_id,size,rho_star,beta\n"));
    }
}
