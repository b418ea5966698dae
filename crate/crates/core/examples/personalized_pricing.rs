//! Optimal prices per customer segment for linear and logit demand, and the
//! demand correction the linear model applies when prices push some demand
//! below zero.
//!
//!     cargo run --example personalized_pricing

use factor_pricing::linalg::Matrix;
use factor_pricing::market::{lcp_adjust, LinearModel, MarketInstance, MnlSegmentModel, Segment};
use factor_pricing::pricing::personalized_optimize;

fn main() -> factor_pricing::Result<()> {
    let b = Matrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]])?;
    let students = LinearModel::new(vec![1.0, 1.0], b.clone())?;
    let professionals = LinearModel::new(vec![3.0, 2.0], b)?;
    let market = MarketInstance::new(vec![Segment::new(0.6, students.clone()), Segment::new(0.4, professionals)])?;

    let ps = personalized_optimize(&market)?;
    for (j, (p, r)) in ps.prices.iter().zip(&ps.profits).enumerate() {
        println!("segment {j}: prices {p:.4?} profit {r:.4}");
    }
    println!("personalized profit {:.4}", ps.aggregate);

    // Raw demand for the second product at (0.2, 0.9) is 1 + 0.2 - 1.8 = -0.6.
    let adj = lcp_adjust(&students, &[0.2, 0.9])?;
    println!(
        "adjusted demand at (0.2, 0.9): {:.4?}, profit {:.4}",
        adj.adjusted_demand, adj.adjusted_profit
    );

    let logit = MnlSegmentModel::new(vec![1.0, 0.5, 0.0], vec![1.0, 0.8, 1.5])?;
    let market = MarketInstance::new(vec![Segment::new(1.0, logit.clone())])?;
    let ps = personalized_optimize(&market)?;
    let markup: Vec<f64> = ps.prices[0].iter().zip(logit.b()).map(|(p, b)| p - 1.0 / b).collect();
    println!("logit prices {:.4?}", ps.prices[0]);
    println!("price - 1/b per product {markup:.6?} (equal to the profit {:.6})", ps.aggregate);
    Ok(())
}
