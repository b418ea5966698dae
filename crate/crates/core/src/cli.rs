//! Command-line front end. `run` parses arguments and returns the exit code:
//! 0 on success, 1 for invalid input, 2 for numerical failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{
    format_table, gen_instance, run_experiment_streaming, write_experiment_csv, Completion, ExperimentConfig, Family,
    CSV_HEADER, INCOMPLETE_MARKER,
};
use crate::clustering::{clustered_factor_profit, fpf_cluster, kmeans_cluster, ClusterPartition};
use crate::error::{PricingError, Result};
use crate::guarantees::{check_a1, check_p1_p2, compute_bound, tightness_oracle};
use crate::market::io::{read_market, write_market, MarketFile};
use crate::optim::log_grid;
use crate::pricing::{
    factor_optimize_with, nonpersonalized_heuristic, personalized_optimize, FactorKind, FactorOptions,
    PersonalizedSolution, QBracket,
};

/// Environment variable capping the experiment worker count.
pub const THREADS_ENV: &str = "FACTOR_PRICE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "factor-pricing", version, about = "Single-factor and personalized multi-product pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random instance file.
    Generate {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize prices with one strategy and print prices and profit.
    Price {
        instance: PathBuf,
        #[arg(long, value_enum)]
        strategy: PriceStrategy,
        /// Price along the factor in this file instead of a built-in one.
        #[arg(long)]
        factor_file: Option<PathBuf>,
        #[arg(long, requires = "q_max")]
        q_min: Option<f64>,
        #[arg(long, requires = "q_min")]
        q_max: Option<f64>,
        /// Write the factor that was priced along.
        #[arg(long)]
        save_factor: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the guarantee for a factor.
    Bound {
        instance: PathBuf,
        #[command(flatten)]
        factor: FactorArgs,
        /// Grid size for the A1 check; 0 skips it.
        #[arg(long, default_value_t = 2000)]
        a1_grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check A1 on a grid and the P1/P2 sufficient conditions per segment.
    Check {
        instance: PathBuf,
        #[command(flatten)]
        factor: FactorArgs,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        /// Write the sampled G and H to this CSV.
        #[arg(long)]
        dump_gh: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Partition segments and price each cluster along its own factor.
    Cluster {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ClusterMethod::Fpf)]
        method: ClusterMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "economic")]
        factor: FactorKind,
        /// Partition CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
    /// Evaluate the worst-case instance for a given price ratio.
    Tightness {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Run an experiment grid and write the results CSV.
    Experiment {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<Family>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
        /// Results CSV; stdout gets a table when set, the CSV otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PriceStrategy {
    Personalized,
    Uniform,
    Economic,
    Robust,
    Nonpersonalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClusterMethod {
    Fpf,
    Kmeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FactorChoice {
    #[value(alias = "uniform")]
    E,
    Economic,
    Robust,
    File,
}

#[derive(Debug, Args)]
struct FactorArgs {
    #[arg(long, value_enum, default_value_t = FactorChoice::Economic)]
    factor: FactorChoice,
    /// Required with `--factor file`.
    #[arg(long)]
    factor_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Machine-readable output.
    #[arg(long)]
    csv: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &PricingError) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Generate { family, n, m, seed, out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let file = gen_instance(family, n, m, &mut rng)?;
            write_market(&out, &file)?;
            Ok(format!("wrote {} instance n={n} m={m} to {}\n", family.name(), out.display()))
        }
        Command::Price { instance, strategy, factor_file, q_min, q_max, save_factor, out } => {
            price(&instance, strategy, factor_file.as_deref(), q_min.zip(q_max), save_factor.as_deref(), out.csv)
        }
        Command::Bound { instance, factor, a1_grid, out } => bound(&instance, &factor, a1_grid, out.csv),
        Command::Check { instance, factor, grid, dump_gh, out } => check(&instance, &factor, grid, dump_gh.as_deref(), out.csv),
        Command::Cluster { instance, k, method, seed, factor, out, csv } => {
            cluster(&instance, k, method, seed, factor, out.as_deref(), csv)
        }
        Command::Tightness { rho, steps, csv } => {
            let r = tightness_oracle(rho, steps)?;
            Ok(if csv {
                format!("personalized,uniform,ratio\n{:.10},{:.10},{:.10}\n", r.personalized, r.uniform, r.ratio)
            } else {
                format!(
                    "personalized  {:.6}\nuniform       {:.6}\nratio         {:.6}\n",
                    r.personalized, r.uniform, r.ratio
                )
            })
        }
        Command::Experiment { config, preset, seed, instances, threads, out } => {
            experiment(config.as_deref(), preset, seed, instances, threads, out.as_deref())
        }
    }
}

fn load(path: &Path) -> Result<(MarketFile, PersonalizedSolution)> {
    let file = read_market(path).map_err(|e| match e {
        PricingError::Io(io) => PricingError::field("instance", format!("{}: {io}", path.display())),
        other => other,
    })?;
    let ps = personalized_optimize(file.market())?;
    Ok((file, ps))
}

/// Reads a factor as a JSON array or as numbers separated by commas or whitespace.
pub fn read_factor(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PricingError::field("factor_file", format!("{}: {e}", path.display())))?;
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(|e| PricingError::field("factor_file", e.to_string()));
    }
    trimmed
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| PricingError::field("factor_file", format!("not a number: {t:?}")))
        })
        .collect()
}

fn write_factor(path: &Path, f: &[f64]) -> Result<()> {
    let text = serde_json::to_string(f).expect("finite factor serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn resolve_factor(args: &FactorArgs, ps: &PersonalizedSolution) -> Result<Vec<f64>> {
    match args.factor {
        FactorChoice::E => FactorKind::Uniform.build(ps),
        FactorChoice::Economic => FactorKind::Economic.build(ps),
        FactorChoice::Robust => FactorKind::Robust.build(ps),
        FactorChoice::File => {
            let path = args
                .factor_file
                .as_deref()
                .ok_or_else(|| PricingError::field("factor_file", "required with --factor file"))?;
            read_factor(path)
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(",")
}

fn price(
    instance: &Path,
    strategy: PriceStrategy,
    factor_file: Option<&Path>,
    q_range: Option<(f64, f64)>,
    save_factor: Option<&Path>,
    csv: bool,
) -> Result<String> {
    let (file, ps) = load(instance)?;
    let market = file.market();
    let mut out = String::new();
    let factor = match (strategy, factor_file) {
        (PriceStrategy::Personalized | PriceStrategy::Nonpersonalized, Some(_)) => {
            return Err(PricingError::field("factor_file", "only applies to single-factor strategies"));
        }
        (_, Some(path)) => Some(read_factor(path)?),
        (PriceStrategy::Uniform, None) => Some(FactorKind::Uniform.build(&ps)?),
        (PriceStrategy::Economic, None) => Some(FactorKind::Economic.build(&ps)?),
        (PriceStrategy::Robust, None) => Some(FactorKind::Robust.build(&ps)?),
        _ => None,
    };
    if q_range.is_some() && factor.is_none() {
        return Err(PricingError::field("q_min", "only applies to single-factor strategies"));
    }
    match (strategy, factor) {
        (PriceStrategy::Personalized, _) => {
            if csv {
                out.push_str("segment,theta,profit,prices\n");
                for j in 0..ps.m() {
                    let _ = writeln!(out, "{j},{},{:.10},\"{}\"", ps.thetas[j], ps.profits[j], join(&ps.prices[j]));
                }
                let _ = writeln!(out, "aggregate,1,{:.10},", ps.aggregate);
            } else {
                let _ = writeln!(out, "{:<8} {:>8} {:>14}  prices", "segment", "theta", "profit");
                for j in 0..ps.m() {
                    let _ = writeln!(out, "{:<8} {:>8.4} {:>14.8}  {}", j, ps.thetas[j], ps.profits[j], fmt_vec(&ps.prices[j]));
                }
                let _ = writeln!(out, "aggregate profit {:.10}", ps.aggregate);
            }
        }
        (PriceStrategy::Nonpersonalized, _) => {
            let h = nonpersonalized_heuristic(market, &ps)?;
            write_prices(&mut out, "nonpersonalized", &h.prices, h.profit, ps.aggregate, None, csv);
        }
        (s, Some(f)) => {
            let bracket = match q_range {
                Some((lo, hi)) => QBracket::Constrained(lo, hi),
                None => QBracket::Personalized(&ps),
            };
            let r = factor_optimize_with(market, &f, bracket, &FactorOptions::default())?;
            if let Some(path) = save_factor {
                write_factor(path, &f)?;
            }
            let name = match s {
                PriceStrategy::Uniform => "uniform",
                PriceStrategy::Economic => "economic",
                PriceStrategy::Robust => "robust",
                _ => "factor",
            };
            let name = if factor_file.is_some() { "factor-file" } else { name };
            write_prices(&mut out, name, &r.prices(), r.profit, ps.aggregate, Some(r.q_star), csv);
            if r.at_bracket_edge && !csv {
                let _ = writeln!(out, "warning: optimum at the edge of q in [{}, {}]", r.bracket.0, r.bracket.1);
            }
        }
        (_, None) => unreachable!("factor strategies always resolve a factor"),
    }
    Ok(out)
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

fn write_prices(out: &mut String, name: &str, prices: &[f64], profit: f64, r_bar: f64, q: Option<f64>, csv: bool) {
    let pct = 100.0 * profit / r_bar;
    if csv {
        let _ = writeln!(out, "strategy,profit,personalized,pct,q,prices");
        let q = q.map(|q| format!("{q:.10}")).unwrap_or_default();
        let _ = writeln!(out, "{name},{profit:.10},{r_bar:.10},{pct:.6},{q},\"{}\"", join(prices));
    } else {
        let _ = writeln!(out, "strategy      {name}");
        if let Some(q) = q {
            let _ = writeln!(out, "q*            {q:.8}");
        }
        let _ = writeln!(out, "profit        {profit:.10}");
        let _ = writeln!(out, "personalized  {r_bar:.10}");
        let _ = writeln!(out, "pct           {pct:.4}");
        let _ = writeln!(out, "prices        {}", fmt_vec(prices));
    }
}

fn bound(instance: &Path, factor: &FactorArgs, a1_grid: usize, csv: bool) -> Result<String> {
    let (file, ps) = load(instance)?;
    let f = resolve_factor(factor, &ps)?;
    let r = factor_optimize_with(file.market(), &f, QBracket::Personalized(&ps), &FactorOptions::default())?;
    let mut report = compute_bound(&ps, &f, Some(&r))?;
    if a1_grid > 0 {
        report = report.with_a1(&check_a1(file.market(), &ps, &f, a1_grid)?);
    }
    let observed = report.guarantee_ratio_observed.unwrap_or(f64::NAN);
    Ok(if csv {
        format!(
            "q_min,q_max,rho,beta,a1,observed_ratio\n{:.10},{:.10},{:.10},{:.10},{},{:.10}\n",
            report.q_min, report.q_max, report.rho, report.beta, report.a1_verified, observed
        )
    } else {
        format!(
            "q_min           {:.8}\nq_max           {:.8}\nrho             {:.8}\nbeta            {:.4}\nA1              {}\nobserved ratio  {:.8}\n",
            report.q_min, report.q_max, report.rho, report.beta, report.a1_verified, observed
        )
    })
}

fn check(instance: &Path, factor: &FactorArgs, grid: usize, dump_gh: Option<&Path>, csv: bool) -> Result<String> {
    let (file, ps) = load(instance)?;
    let market = file.market();
    let f = resolve_factor(factor, &ps)?;
    let profile = check_a1(market, &ps, &f, grid)?;
    if let Some(path) = dump_gh {
        std::fs::write(path, profile.to_csv())?;
    }
    let (q_min, q_max) = ps.q_bounds(&f);
    let scan: Vec<Vec<f64>> = log_grid(q_min / 2.0, 2.0 * q_max, 20)
        .into_iter()
        .map(|q| f.iter().map(|x| q * x).collect())
        .collect();
    let mut out = String::new();
    let a1 = match profile.violation {
        Some(q) => format!("violated at q={q:.8}"),
        None => format!("verified on {} points", profile.grid.len()),
    };
    if csv {
        let _ = writeln!(out, "segment,p1,p2");
    } else {
        let _ = writeln!(out, "A1  {a1}");
        let _ = writeln!(out, "{:<8} {:>5} {:>5}", "segment", "P1", "P2");
    }
    for (j, seg) in market.segments().iter().enumerate() {
        let mut probes = scan.clone();
        probes.push(ps.prices[j].clone());
        probes.push(vec![0.0; ps.n()]);
        let r = check_p1_p2(&seg.model, &f, &probes)?;
        if csv {
            let _ = writeln!(out, "{j},{},{}", r.p1, r.p2);
        } else {
            let _ = writeln!(out, "{:<8} {:>5} {:>5}", j, yes(r.p1), yes(r.p2));
        }
    }
    if csv {
        let _ = writeln!(out, "a1,{}", profile.verified());
    }
    Ok(out)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cluster(
    instance: &Path,
    k: usize,
    method: ClusterMethod,
    seed: u64,
    kind: FactorKind,
    out_path: Option<&Path>,
    csv: bool,
) -> Result<String> {
    let (file, ps) = load(instance)?;
    let partition: ClusterPartition = match method {
        ClusterMethod::Fpf => fpf_cluster(&ps, k)?,
        ClusterMethod::Kmeans => kmeans_cluster(&ps, k, 100, seed)?,
    };
    if let Some(path) = out_path {
        std::fs::write(path, partition.to_csv())?;
    }
    let profit = clustered_factor_profit(file.market(), &ps, &partition, kind)?;
    let mut out = String::new();
    if csv {
        out.push_str(&partition.to_csv());
        let _ = writeln!(out, "\nclustered_profit,personalized,pct\n{:.10},{:.10},{:.6}", profit.profit, ps.aggregate, 100.0 * profit.profit / ps.aggregate);
    } else {
        let _ = writeln!(out, "{:<8} {:>5} {:>12} {:>8} {:>14}", "cluster", "size", "rho*", "beta", "profit");
        for (c, cl) in partition.clusters.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:<8} {:>5} {:>12.6} {:>8.4} {:>14.8}",
                c,
                cl.members.len(),
                cl.rho_star,
                1.0 + cl.rho_star.ln(),
                profit.per_cluster[c].profit
            );
        }
        let _ = writeln!(out, "worst rho* {:.6}  beta {:.4}", partition.worst_rho, 1.0 + partition.worst_rho.ln());
        let _ = writeln!(out, "clustered {} profit {:.10} ({:.4}% of personalized)", kind.name(), profit.profit, 100.0 * profit.profit / ps.aggregate);
    }
    Ok(out)
}

fn env_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| PricingError::field(THREADS_ENV, format!("expected a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn experiment(
    config: Option<&Path>,
    preset: Option<Family>,
    seed: Option<u64>,
    instances: Option<usize>,
    threads: Option<usize>,
    out_path: Option<&Path>,
) -> Result<String> {
    let mut cfg = match (config, preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| PricingError::field("config", format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(family)) => ExperimentConfig::preset(family),
        (None, None) => return Err(PricingError::field("config", "pass --config or --preset")),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(i) = instances {
        cfg.instances_per_cell = i;
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    if let Some(cap) = env_threads()? {
        let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        cfg.threads = Some(cfg.threads.unwrap_or(available).min(cap));
    }
    cfg.validate()?;

    let cancel = Arc::new(AtomicBool::new(false));
    {
        let cancel = Arc::clone(&cancel);
        // Only the first registration in a process succeeds; later runs share it.
        let _ = ctrlc::set_handler(move || cancel.store(true, Ordering::SeqCst));
    }
    match out_path {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            writeln!(file, "{CSV_HEADER}")?;
            let mut rows = Vec::new();
            let mut io_err = None;
            let done = run_experiment_streaming(&cfg, Some(&cancel), |row| {
                rows.push(row.clone());
                if io_err.is_none() {
                    io_err = writeln!(file, "{}", row.csv_row()).and_then(|_| file.flush()).err();
                }
            })?;
            if let Some(e) = io_err {
                return Err(e.into());
            }
            if done == Completion::Cancelled {
                writeln!(file, "{INCOMPLETE_MARKER}")?;
            }
            file.flush()?;
            let mut text = format_table(&rows);
            let _ = writeln!(text, "wrote {}", path.display());
            if done == Completion::Cancelled {
                let _ = writeln!(text, "interrupted; partial results marked {INCOMPLETE_MARKER}");
            }
            Ok(text)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let done = write_experiment_csv(&cfg, Some(&cancel), &mut lock)?;
            lock.flush()?;
            if done == Completion::Cancelled {
                eprintln!("interrupted");
            }
            Ok(String::new())
        }
    }
}
