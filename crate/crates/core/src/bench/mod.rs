//! Random instance families and experiment presets that report each pricing
//! strategy's profit as a percentage of personalized profit.

mod config;
mod experiment;
mod generators;
mod seeds;

pub use config::{ExperimentConfig, Family, Strategy};
pub use experiment::{
    evaluate_instance, run_experiment, run_experiment_streaming, CellResult, Completion, ExperimentReport,
    InstanceOutcome, StrategyOutcome, CSV_HEADER, format_table, write_experiment_csv, INCOMPLETE_MARKER,
};
pub use generators::{
    gen_instance, gen_lcmnl_instance, gen_linear_instance, gen_nonlinear_instance, random_m_matrix,
};
pub use seeds::substream_seed;
