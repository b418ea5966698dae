use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_k, ClusterPartition};
use crate::error::Result;
use crate::pricing::PersonalizedSolution;

#[derive(Debug, Clone)]
pub struct KMeansOptions {
    pub max_iters: usize,
    pub seed: u64,
    /// Cluster log prices instead of raw prices.
    pub log_space: bool,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            max_iters: 100,
            seed: 0,
            log_space: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansTrace {
    pub partition: ClusterPartition,
    /// Within-cluster sum of squares after each iteration.
    pub inertia: Vec<f64>,
    pub converged: bool,
}

pub fn kmeans_cluster(ps: &PersonalizedSolution, k: usize, max_iters: usize, seed: u64) -> Result<ClusterPartition> {
    let opts = KMeansOptions {
        max_iters,
        seed,
        ..KMeansOptions::default()
    };
    Ok(kmeans_trace(ps, k, &opts)?.partition)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm on the personalized price vectors.
///
/// Initial centroids are `k` distinct segments drawn from `seed`. An emptied
/// cluster takes over the point farthest from its centroid among clusters
/// with more than one member.
pub fn kmeans_trace(ps: &PersonalizedSolution, k: usize, opts: &KMeansOptions) -> Result<KMeansTrace> {
    check_k(ps, k)?;
    let m = ps.m();
    let points: Vec<Vec<f64>> = if opts.log_space {
        ps.prices.iter().map(|p| p.iter().map(|x| x.ln()).collect()).collect()
    } else {
        ps.prices.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut seeds = sample(&mut rng, m, k).into_vec();
    seeds.sort_unstable();
    let mut centroids: Vec<Vec<f64>> = seeds.iter().map(|&j| points[j].clone()).collect();

    let mut assignment: Vec<usize> = vec![usize::MAX; m];
    let mut inertia = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iters.max(1) {
        let mut next: Vec<usize> = points
            .iter()
            .map(|p| {
                let mut best = 0;
                let mut best_d = sq_dist(p, &centroids[0]);
                for (c, cen) in centroids.iter().enumerate().skip(1) {
                    let d = sq_dist(p, cen);
                    if d < best_d {
                        best = c;
                        best_d = d;
                    }
                }
                best
            })
            .collect();
        repair_empty(&points, &centroids, &mut next, k);

        centroids = (0..k)
            .map(|c| {
                let members: Vec<&Vec<f64>> = points.iter().zip(&next).filter(|(_, a)| **a == c).map(|(p, _)| p).collect();
                let dim = points[0].len();
                let mut cen = vec![0.0; dim];
                for p in &members {
                    for (x, v) in cen.iter_mut().zip(p.iter()) {
                        *x += v / members.len() as f64;
                    }
                }
                cen
            })
            .collect();
        inertia.push(points.iter().zip(&next).map(|(p, &c)| sq_dist(p, &centroids[c])).sum());

        let stable = next == assignment;
        assignment = next;
        if stable {
            converged = true;
            break;
        }
    }
    Ok(KMeansTrace {
        partition: ClusterPartition::from_assignment(ps, assignment)?,
        inertia,
        converged,
    })
}

fn repair_empty(points: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &c in assignment.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut far: Option<(usize, f64)> = None;
        for (j, p) in points.iter().enumerate() {
            let c = assignment[j];
            if sizes[c] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[c]);
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((j, d));
            }
        }
        let (j, _) = far.expect("k <= m leaves a cluster with two members");
        assignment[j] = empty;
    }
}
