//! Grouping segments whose optimal prices are close, then pricing each group
//! along its own factor.
//!
//!     cargo run --example clustering

use factor_pricing::bench::gen_linear_instance;
use factor_pricing::clustering::{clustered_factor_profit, fpf_cluster, kmeans_cluster};
use factor_pricing::pricing::{factor_optimize, personalized_optimize, FactorKind, QBracket};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> factor_pricing::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let market = gen_linear_instance(4, 8, &mut rng)?;
    let ps = personalized_optimize(&market)?;
    let f = FactorKind::Economic.build(&ps)?;
    let single = factor_optimize(&market, &f, QBracket::Personalized(&ps))?;
    println!("one economic factor: {:.2}%", 100.0 * single.profit / ps.aggregate);

    for k in 1..=4 {
        let fpf = fpf_cluster(&ps, k)?;
        let km = kmeans_cluster(&ps, k, 100, 5)?;
        let fpf_profit = clustered_factor_profit(&market, &ps, &fpf, FactorKind::Economic)?.profit;
        let km_profit = clustered_factor_profit(&market, &ps, &km, FactorKind::Economic)?.profit;
        println!(
            "K={k}: fpf {:?} worst beta {:.3} -> {:.2}% | k-means {:?} -> {:.2}%",
            fpf.assignment,
            1.0 + fpf.worst_rho.ln(),
            100.0 * fpf_profit / ps.aggregate,
            km.assignment,
            100.0 * km_profit / ps.aggregate
        );
    }
    Ok(())
}
