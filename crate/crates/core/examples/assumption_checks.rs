//! Checking the condition behind the guarantee on a grid, and the simpler
//! substitutes conditions that imply it.
//!
//!     cargo run --example assumption_checks

use factor_pricing::bench::gen_lcmnl_instance;
use factor_pricing::guarantees::{check_a1, check_p1_p2, compute_bound};
use factor_pricing::market::{DemandModel, MnlSegmentModel};
use factor_pricing::pricing::{personalized_optimize, FactorKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> factor_pricing::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let market = gen_lcmnl_instance(3, 3, &mut rng)?;
    let ps = personalized_optimize(&market)?;
    let f = FactorKind::Robust.build(&ps)?;
    let profile = check_a1(&market, &ps, &f, 500)?;
    let report = compute_bound(&ps, &f, None)?.with_a1(&profile);
    println!("robust factor {f:.4?}");
    println!("G <= H on {} points: {}", profile.grid.len(), report.a1_verified);
    println!("certified beta {:.4}: {}", report.beta, report.certified());
    for (q, (g, h)) in profile.grid.iter().zip(profile.g_values.iter().zip(&profile.h_values)).step_by(100) {
        println!("  q {q:>9.4}  G {g:.5}  H {h:.5}");
    }

    // A very lopsided factor breaks the own-price condition for logit demand.
    let logit: DemandModel = MnlSegmentModel::new(vec![4.0, 4.0], vec![1.0, 1.0])?.into();
    let r = check_p1_p2(&logit, &[10.0, 0.1], &[vec![0.0, 0.0], vec![5.0, 5.0]])?;
    println!("\nlogit, f = (10, 0.1): P1 {} P2 {} (fails at probes {:?})", r.p1, r.p2, r.p2_failures);
    Ok(())
}
