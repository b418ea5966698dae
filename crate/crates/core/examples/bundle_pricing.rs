//! Bundles: bundle-size and component pricing against mixed bundling, and
//! linear pricing of one good sold in sizes 1..n.
//!
//!     cargo run --example bundle_pricing

use factor_pricing::bench::gen_nonlinear_instance;
use factor_pricing::guarantees::{compute_bound, nonlinear_pricing_beta};
use factor_pricing::linalg::Matrix;
use factor_pricing::market::{BundleMarket, BundleSpace, LinearModel, MarketInstance, Segment};
use factor_pricing::pricing::{
    bundle_size_factor, component_factor, factor_optimize, personalized_optimize, QBracket,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> factor_pricing::Result<()> {
    // Bundles {1}, {2}, {1,2}; with B = I the mixed-bundle prices are (1, 2, 2.5).
    let space = BundleSpace::all_subsets(2)?;
    let model = LinearModel::new(vec![2.0, 4.0, 5.0], Matrix::identity(3))?;
    let bundles = BundleMarket::new(space, MarketInstance::new(vec![Segment::new(1.0, model)])?)?;
    let ps = personalized_optimize(bundles.market())?;
    println!("mixed bundle prices {:?}", ps.prices[0]);

    for (name, f) in [
        ("bundle size", bundle_size_factor(&bundles, |s| s as f64)?),
        ("component", component_factor(&bundles, &[1.0, 2.0])?),
    ] {
        let r = factor_optimize(bundles.market(), &f, QBracket::Personalized(&ps))?;
        let b = compute_bound(&ps, &f, Some(&r))?;
        println!(
            "{name:<12} f {f:?}  beta {:.4}  profit {:.4} of {:.4}",
            b.beta, r.profit, ps.aggregate
        );
    }

    // One good in sizes 1..=20 with concave utilities, two segments.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sizes = gen_nonlinear_instance(20, 2, &mut rng)?;
    let ps = personalized_optimize(sizes.market())?;
    let f = bundle_size_factor(&sizes, |s| s as f64)?;
    let r = factor_optimize(sizes.market(), &f, QBracket::Personalized(&ps))?;
    println!(
        "\nlinear pricing of sizes 1..20: {:.2}% of personalized non-linear pricing",
        100.0 * r.profit / ps.aggregate
    );
    // Optimal bundle prices are half the utilities, so v = 2 p̄ per segment.
    for (j, p) in ps.prices.iter().enumerate() {
        let v: Vec<f64> = p.iter().map(|x| 2.0 * x).collect();
        println!("segment {j}: 1 + ln(n v_1 / v_n) = {:.4}", nonlinear_pricing_beta(&v)?);
    }
    println!("both segments together: beta {:.4}", compute_bound(&ps, &f, Some(&r))?.beta);
    Ok(())
}
