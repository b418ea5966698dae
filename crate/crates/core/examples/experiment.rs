//! A small randomized comparison of pricing strategies.
//!
//!     cargo run --release --example experiment -- [family] [out.csv]

use factor_pricing::bench::{format_table, run_experiment, ExperimentConfig, Family};

fn main() -> factor_pricing::Result<()> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("lcmnl-cluster").parse()?;
    let config = ExperimentConfig {
        instances_per_cell: 10,
        ..ExperimentConfig::preset(family)
    };
    let report = run_experiment(&config)?;
    print!("{}", format_table(&report.cells));
    if let Some(path) = args.next() {
        std::fs::write(&path, report.to_csv())?;
        println!("wrote {path}");
    }
    Ok(())
}
