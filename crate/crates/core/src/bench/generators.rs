//! Random instance generators.
//!
//! Every draw comes from the caller's RNG, so an instance is a pure function of
//! the seed that initialized it.

use rand::Rng;

use super::Family;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::market::io::MarketFile;
use crate::market::{BundleMarket, BundleSpace, DemandModel, LinearModel, MarketInstance, MnlSegmentModel};

/// Uniform draw on `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn segment_weights<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    (0..m).map(|_| open_unit(rng)).collect()
}

/// Symmetric, strictly diagonally dominant matrix with nonpositive
/// off-diagonals (hence a positive-definite M-matrix). Off-diagonal
/// magnitudes are `U[0, scale/n]`; the diagonal adds `U[0.5, 1.5]` to the
/// absolute row sum.
pub fn random_m_matrix<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Matrix {
    let mut b = Matrix::zeros(n);
    for i in 0..n {
        for k in (i + 1)..n {
            let v = -scale * rng.random::<f64>() / n as f64;
            b[(i, k)] = v;
            b[(k, i)] = v;
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&k| k != i).map(|k| b[(i, k)].abs()).sum();
        b[(i, i)] = off + rng.random_range(0.5..=1.5);
    }
    b
}

pub fn gen_linear_instance<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MarketInstance> {
    let weights = segment_weights(m, rng);
    let models = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n).map(|_| open_unit(rng)).collect();
            let b = random_m_matrix(n, 1.0, rng);
            LinearModel::new(a, b).map(DemandModel::from)
        })
        .collect::<Result<Vec<_>>>()?;
    MarketInstance::from_weights(&weights, models)
}

/// Latent-class MNL: `a_ij = ln((1 ± σ_i) v_ij / n)` with the sign chosen by a
/// fair coin, `v_ij ~ U[0, 10]`, `σ_i ~ U[0, 1]`, and `b_ij` triangular on
/// `(0, 2)` (sum of two uniforms). Zero draws of `v` or `b` are redrawn.
pub fn gen_lcmnl_instance<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MarketInstance> {
    let weights = segment_weights(m, rng);
    let sigma: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let models = (0..m)
        .map(|_| {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for s in &sigma {
                let v = loop {
                    let v = 10.0 * rng.random::<f64>();
                    if v > 0.0 {
                        break v;
                    }
                };
                let spread = if rng.random_bool(0.5) { 1.0 - s } else { 1.0 + s };
                a.push((spread * v / n as f64).ln());
                b.push(loop {
                    let x = rng.random::<f64>() + rng.random::<f64>();
                    if x > 0.0 {
                        break x;
                    }
                });
            }
            MnlSegmentModel::new(a, b).map(DemandModel::from)
        })
        .collect::<Result<Vec<_>>>()?;
    MarketInstance::from_weights(&weights, models)
}

/// Decay exponent of the utility increments: the `k`-th increment is
/// `k^-1.5` times a `U[0.5, 1.5)` draw.
const INCREMENT_DECAY: f64 = 1.5;

/// Gross utilities for bundle sizes `1..=n`: strictly decreasing positive
/// increments, prefix-summed, so `u` is increasing and `u_i / i` decreasing.
fn concave_utilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let increments = loop {
        let mut inc: Vec<f64> = (1..=n)
            .map(|k| (k as f64).powf(-INCREMENT_DECAY) * rng.random_range(0.5..1.5))
            .collect();
        inc.sort_by(|x, y| y.total_cmp(x));
        if inc.windows(2).all(|w| w[0] > w[1]) && inc.iter().all(|&x| x > 0.0) {
            break inc;
        }
    };
    increments
        .iter()
        .scan(0.0, |s, x| {
            *s += x;
            Some(*s)
        })
        .collect()
}

/// One good sold in bundle sizes `1..=n`. Each segment has linear demand over
/// sizes with an M-matrix `B` and intercept `a = B u`. Cross-size effects are
/// halved until every intercept is positive, so `u/2` stays optimal.
pub fn gen_nonlinear_instance<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<BundleMarket> {
    let weights = segment_weights(m, rng);
    let mut models = Vec::with_capacity(m);
    for _ in 0..m {
        let u = concave_utilities(n, rng);
        let mut b = random_m_matrix(n, 1.0, rng);
        let a = loop {
            let a = b.mul_vec(&u);
            if a.iter().all(|&x| x > 0.0) {
                break a;
            }
            for i in 0..n {
                let mut off = 0.0;
                for k in 0..n {
                    if k != i {
                        b[(i, k)] *= 0.5;
                        off += b[(i, k)].abs();
                    }
                }
                // Keep the diagonal surplus over the off-diagonal row sum.
                let surplus = b[(i, i)] - 2.0 * off;
                b[(i, i)] = off + surplus;
            }
        };
        models.push(LinearModel::new(a, b)?.into());
    }
    let inner = MarketInstance::from_weights(&weights, models)?;
    BundleMarket::new(BundleSpace::Sizes { max_size: n }, inner)
}

pub fn gen_instance<R: Rng + ?Sized>(family: Family, n: usize, m: usize, rng: &mut R) -> Result<MarketFile> {
    Ok(match family {
        Family::Linear | Family::LinearCluster => gen_linear_instance(n, m, rng)?.into(),
        Family::Lcmnl | Family::LcmnlCluster => gen_lcmnl_instance(n, m, rng)?.into(),
        Family::Nonlinear => gen_nonlinear_instance(n, m, rng)?.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guarantees::check_p1_p2;
    use crate::pricing::personalized_optimize;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_instances_are_m_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let mk = gen_linear_instance(4, 3, &mut rng).unwrap();
            assert!((mk.thetas().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for s in mk.segments() {
                let lin = s.model.as_linear().unwrap();
                assert_eq!(lin.b().asymmetry(), 0.0);
                assert!(lin.has_z_pattern(0.0));
                assert!(lin.b().cholesky().is_some());
                let r = check_p1_p2(&s.model, &[1.0; 4], &[]).unwrap();
                assert!(r.p1 && r.p2);
            }
        }
    }

    #[test]
    fn lcmnl_parameters_in_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let mk = gen_lcmnl_instance(6, 4, &mut rng).unwrap();
            for s in mk.segments() {
                let mnl = s.model.as_mnl().unwrap();
                assert!(mnl.b().iter().all(|&b| b > 0.0 && b < 2.0));
                assert!(mnl.a().iter().all(|a| a.is_finite()));
            }
        }
    }

    #[test]
    fn triangular_sensitivity_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mk = gen_lcmnl_instance(1000, 100, &mut rng).unwrap();
        let bs: Vec<f64> = mk.segments().iter().flat_map(|s| s.model.as_mnl().unwrap().b().to_vec()).collect();
        assert_eq!(bs.len(), 100_000);
        let mean = bs.iter().sum::<f64>() / bs.len() as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn nonlinear_utilities_are_concave_and_optimum_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [1, 2, 10, 50] {
            let u = concave_utilities(n, &mut rng);
            for i in 1..n {
                assert!(u[i] > u[i - 1]);
                assert!(u[i] / (i + 1) as f64 > 0.0 && u[i] / ((i + 1) as f64) < u[i - 1] / i as f64);
            }
            let bm = gen_nonlinear_instance(n, 3, &mut rng).unwrap();
            let ps = personalized_optimize(&bm).unwrap();
            for (s, p) in bm.segments().iter().zip(&ps.prices) {
                let lin = s.model.as_linear().unwrap();
                assert!(lin.has_z_pattern(0.0));
                let d = s.model.demand(p).unwrap();
                for (di, ai) in d.iter().zip(lin.a()) {
                    assert!((di - 0.5 * ai).abs() < 1e-9 * (1.0 + ai.abs()) && *di > 0.0);
                }
            }
        }
    }
}
