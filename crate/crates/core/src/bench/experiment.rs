use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{gen_instance, substream_seed, ExperimentConfig, Strategy};
use crate::clustering::{clustered_factor_profit, fpf_cluster, kmeans_cluster};
use crate::error::{PricingError, Result};
use crate::guarantees::compute_bound;
use crate::market::io::{write_market, MarketFile};
use crate::pricing::{
    bundle_size_factor, factor_optimize_with, nonpersonalized_heuristic, personalized_optimize, FactorKind,
    FactorOptions, QBracket,
};

pub const CSV_HEADER: &str = "family,n,m,strategy,mean_pct,std_pct,instances,errors,runtime_ms";

/// Marker appended to a CSV whose run was interrupted.
pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";

const KMEANS_MAX_ITERS: usize = 100;

/// Aggregated percentages of one strategy over the instances of one `(n, m)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub strategy: String,
    /// Mean over instances of `100 · profit / R̄`.
    pub mean_pct: f64,
    pub std_pct: f64,
    /// Instances that evaluated successfully.
    pub instances: usize,
    pub errors: usize,
    /// Mean wall-clock time per instance, zero when timing is off.
    pub runtime_ms: f64,
}

impl CellResult {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{},{},{:.3}",
            self.family, self.n, self.m, self.strategy, self.mean_pct, self.std_pct, self.instances, self.errors, self.runtime_ms
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub cells: Vec<CellResult>,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&c.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn cell(&self, n: usize, m: usize, strategy: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.n == n && c.m == m && c.strategy == strategy)
    }
}

/// Result of one strategy on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct StrategyOutcome {
    pub label: String,
    pub profit: f64,
    /// Single-factor strategies: the direction priced along.
    pub factor: Option<Vec<f64>>,
    /// Single-factor strategies: `1 + ln ρ` for that direction.
    pub beta: Option<f64>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceOutcome {
    /// Personalized profit `R̄`.
    pub personalized: f64,
    pub strategies: Vec<StrategyOutcome>,
}

impl InstanceOutcome {
    pub fn get(&self, label: &str) -> Option<&StrategyOutcome> {
        self.strategies.iter().find(|s| s.label == label)
    }
}

/// Evaluates the requested strategies on one instance.
pub fn evaluate_instance(
    file: &MarketFile,
    strategies: &[Strategy],
    k: usize,
    kmeans_seed: u64,
    grid_points: usize,
) -> Result<InstanceOutcome> {
    let market = file.market();
    let ps = personalized_optimize(market)?;
    let opts = FactorOptions {
        grid_points,
        ..FactorOptions::default()
    };
    let mut out = Vec::new();
    for &strategy in strategies {
        let start = Instant::now();
        let single = |label: &str, f: Vec<f64>| -> Result<StrategyOutcome> {
            let r = factor_optimize_with(market, &f, QBracket::Personalized(&ps), &opts)?;
            let beta = compute_bound(&ps, &f, Some(&r))?.beta;
            Ok(StrategyOutcome {
                label: label.to_string(),
                profit: r.profit,
                factor: Some(f),
                beta: Some(beta),
                elapsed_ms: 0.0,
            })
        };
        let mut produced = match strategy {
            Strategy::Uniform => vec![single("uniform", FactorKind::Uniform.build(&ps)?)?],
            Strategy::Economic => vec![single("economic", FactorKind::Economic.build(&ps)?)?],
            Strategy::Robust => vec![single("robust", FactorKind::Robust.build(&ps)?)?],
            Strategy::Linear => {
                let bundles = file
                    .bundle()
                    .ok_or_else(|| PricingError::Argument("linear schedule needs a bundle-size market".into()))?;
                vec![single("linear", bundle_size_factor(bundles, |s| s as f64)?)?]
            }
            Strategy::Nonpersonalized => {
                let h = nonpersonalized_heuristic(market, &ps)?;
                vec![StrategyOutcome {
                    label: "nonpersonalized".into(),
                    profit: h.profit,
                    factor: None,
                    beta: None,
                    elapsed_ms: 0.0,
                }]
            }
            Strategy::ClusteredEconomic | Strategy::ClusteredRobust => {
                let (kind, name) = if strategy == Strategy::ClusteredEconomic {
                    (FactorKind::Economic, "clustered-economic")
                } else {
                    (FactorKind::Robust, "clustered-robust")
                };
                let k = k.min(ps.m());
                let mut rows = Vec::with_capacity(2);
                for (method, partition) in [
                    ("fpf", fpf_cluster(&ps, k)?),
                    ("kmeans", kmeans_cluster(&ps, k, KMEANS_MAX_ITERS, kmeans_seed)?),
                ] {
                    let t = Instant::now();
                    let profit = clustered_factor_profit(market, &ps, &partition, kind)?.profit;
                    rows.push(StrategyOutcome {
                        label: format!("{name}-{method}"),
                        profit,
                        factor: None,
                        beta: Some(1.0 + partition.worst_rho.ln()),
                        elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
                    });
                }
                rows
            }
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if produced.len() == 1 {
            produced[0].elapsed_ms = elapsed;
        }
        out.extend(produced);
    }
    Ok(InstanceOutcome {
        personalized: ps.aggregate,
        strategies: out,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    Complete,
    Cancelled,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut cells = Vec::new();
    run_experiment_streaming(config, None, |c| cells.push(c.clone()))?;
    Ok(ExperimentReport { cells })
}

/// Runs every `(n, m)` cell in order, handing each finished row to `sink`.
/// Checks `cancel` between cells. Instances within a cell run in parallel;
/// results are reduced in instance order, so output does not depend on the
/// thread count.
pub fn run_experiment_streaming(
    config: &ExperimentConfig,
    cancel: Option<&AtomicBool>,
    mut sink: impl FnMut(&CellResult),
) -> Result<Completion> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| PricingError::Argument(format!("thread pool: {e}")))?;
    if let Some(dir) = &config.dump_dir {
        std::fs::create_dir_all(dir)?;
    }
    let per_cell = config.instances_per_cell;
    let mut cell_index = 0u64;
    for &n in &config.n_values {
        for &m in &config.m_values {
            if cancel.is_some_and(|c| c.load(Ordering::SeqCst)) {
                return Ok(Completion::Cancelled);
            }
            let cell = cell_index;
            cell_index += 1;
            let outcomes: Vec<Result<InstanceOutcome>> = pool.install(|| {
                (0..per_cell as u64)
                    .into_par_iter()
                    .map(|i| run_instance(config, n, m, cell, i))
                    .collect()
            });
            for row in summarize(config, n, m, &outcomes)? {
                sink(&row);
            }
        }
    }
    Ok(Completion::Complete)
}

fn run_instance(config: &ExperimentConfig, n: usize, m: usize, cell: u64, instance: u64) -> Result<InstanceOutcome> {
    let seed = substream_seed(config.seed, cell, instance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let file = gen_instance(config.family, n, m, &mut rng)?;
    if let Some(dir) = &config.dump_dir {
        let path = dir.join(format!("{}_n{n}_m{m}_i{instance}.json", config.family.name()));
        write_market(path, &file)?;
    }
    evaluate_instance(&file, &config.strategies, config.k, substream_seed(seed, u64::MAX, 0), config.grid_points)
}

fn summarize(
    config: &ExperimentConfig,
    n: usize,
    m: usize,
    outcomes: &[Result<InstanceOutcome>],
) -> Result<Vec<CellResult>> {
    let ok: Vec<&InstanceOutcome> = outcomes.iter().filter_map(|r| r.as_ref().ok()).collect();
    let errors = outcomes.len() - ok.len();
    if errors * 10 > outcomes.len() || ok.is_empty() {
        let first = outcomes
            .iter()
            .find_map(|r| r.as_ref().err())
            .map(|e| e.to_string())
            .unwrap_or_default();
        return Err(PricingError::numerical(
            format!(
                "cell {} n={n} m={m}: {errors} of {} instances failed (first: {first})",
                config.family.name(),
                outcomes.len()
            ),
            errors as f64,
        ));
    }
    let labels: Vec<String> = ok[0].strategies.iter().map(|s| s.label.clone()).collect();
    let rows = labels
        .iter()
        .enumerate()
        .map(|(idx, label)| {
            let pct: Vec<f64> = ok.iter().map(|o| 100.0 * o.strategies[idx].profit / o.personalized).collect();
            let count = pct.len() as f64;
            let mean = pct.iter().sum::<f64>() / count;
            let std = if pct.len() > 1 {
                (pct.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            let runtime_ms = if config.timing {
                ok.iter().map(|o| o.strategies[idx].elapsed_ms).sum::<f64>() / count
            } else {
                0.0
            };
            CellResult {
                family: config.family.name().to_string(),
                n,
                m,
                strategy: label.clone(),
                mean_pct: mean,
                std_pct: std,
                instances: ok.len(),
                errors,
                runtime_ms,
            }
        })
        .collect();
    Ok(rows)
}

/// Writes the header, streams rows as cells finish, and appends the
/// incomplete marker when cancelled.
pub fn write_experiment_csv(
    config: &ExperimentConfig,
    cancel: Option<&AtomicBool>,
    out: &mut impl std::io::Write,
) -> Result<Completion> {
    writeln!(out, "{CSV_HEADER}")?;
    out.flush()?;
    let mut io_err = None;
    let done = run_experiment_streaming(config, cancel, |row| {
        if io_err.is_none() {
            if let Err(e) = writeln!(out, "{}", row.csv_row()).and_then(|_| out.flush()) {
                io_err = Some(e);
            }
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    if done == Completion::Cancelled {
        writeln!(out, "{INCOMPLETE_MARKER}")?;
    }
    Ok(done)
}

/// Formats rows as an aligned text table.
pub fn format_table(cells: &[CellResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>4} {:>4} {:<26} {:>9} {:>8} {:>5} {:>6} {:>11}",
        "family", "n", "m", "strategy", "mean_pct", "std_pct", "inst", "errors", "runtime_ms"
    );
    for c in cells {
        let _ = writeln!(
            out,
            "{:<14} {:>4} {:>4} {:<26} {:>9.3} {:>8.3} {:>5} {:>6} {:>11.3}",
            c.family, c.n, c.m, c.strategy, c.mean_pct, c.std_pct, c.instances, c.errors, c.runtime_ms
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Family;

    fn tiny(family: Family, strategies: Vec<Strategy>) -> ExperimentConfig {
        ExperimentConfig {
            n_values: vec![2],
            m_values: vec![1, 3],
            instances_per_cell: 3,
            strategies,
            timing: false,
            grid_points: 200,
            threads: Some(1),
            ..ExperimentConfig::preset(family)
        }
    }

    #[test]
    fn single_segment_factors_are_personalized() {
        let cfg = ExperimentConfig {
            m_values: vec![1],
            ..tiny(Family::Lcmnl, vec![Strategy::Economic, Strategy::Robust])
        };
        let rep = run_experiment(&cfg).unwrap();
        for c in &rep.cells {
            assert!((c.mean_pct - 100.0).abs() < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn csv_shape() {
        let rep = run_experiment(&tiny(Family::Linear, vec![Strategy::Uniform, Strategy::ClusteredEconomic])).unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 2 * 3);
        assert!(rep.cell(2, 3, "clustered-economic-kmeans").is_some());
        assert!(rep.cells.iter().all(|c| c.mean_pct <= 100.0 + 1e-6 && c.mean_pct > 0.0));
    }

    #[test]
    fn cancelled_run_marks_incomplete() {
        let cancel = AtomicBool::new(true);
        let mut buf = Vec::new();
        let done = write_experiment_csv(&tiny(Family::Linear, vec![Strategy::Uniform]), Some(&cancel), &mut buf).unwrap();
        assert_eq!(done, Completion::Cancelled);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{CSV_HEADER}\n{INCOMPLETE_MARKER}\n"));
    }
}
