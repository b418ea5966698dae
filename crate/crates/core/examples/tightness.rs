//! The instance on which uniform pricing earns exactly `1 / (1 + ln ρ)` of
//! personalized profit.
//!
//!     cargo run --example tightness

use factor_pricing::guarantees::tightness_oracle;

fn main() -> factor_pricing::Result<()> {
    println!("{:>10} {:>10} {:>10} {:>10}", "rho", "uniform", "ratio", "1+ln rho");
    for rho in [2.0, std::f64::consts::E, 4.0, 7.389056, 10.0, 100.0] {
        let r = tightness_oracle(rho, 100_000)?;
        println!("{:>10.4} {:>10.6} {:>10.6} {:>10.6}", rho, r.uniform, r.ratio, 1.0 + f64::ln(rho));
    }
    Ok(())
}
