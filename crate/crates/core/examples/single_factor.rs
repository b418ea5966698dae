//! Pricing every segment along one direction `q f` with the uniform, economic
//! and robust factors, and the guarantee each direction carries.
//!
//!     cargo run --example single_factor

use factor_pricing::bench::gen_lcmnl_instance;
use factor_pricing::guarantees::compute_bound;
use factor_pricing::pricing::{factor_optimize, personalized_optimize, FactorKind, QBracket};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> factor_pricing::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let market = gen_lcmnl_instance(5, 4, &mut rng)?;
    let ps = personalized_optimize(&market)?;
    println!("personalized profit {:.6}\n", ps.aggregate);
    println!("{:<10} {:>10} {:>8} {:>8} {:>10}", "factor", "profit", "pct", "beta", "R/R^f");
    for kind in [FactorKind::Uniform, FactorKind::Economic, FactorKind::Robust] {
        let f = kind.build(&ps)?;
        let r = factor_optimize(&market, &f, QBracket::Personalized(&ps))?;
        let bound = compute_bound(&ps, &f, Some(&r))?;
        println!(
            "{:<10} {:>10.6} {:>8.2} {:>8.4} {:>10.4}",
            kind.name(),
            r.profit,
            100.0 * r.profit / ps.aggregate,
            bound.beta,
            bound.guarantee_ratio_observed.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
