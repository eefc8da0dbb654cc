//! Command-line interface: `test`, `simulate`, `experiment`, `bandwidth`.
//!
//! Exit codes: 0 = ran to completion (whatever the verdict), 2 = bad
//! arguments, 3 = bad input data, 4 = internal contract violation.

use crate::combine::{Preset, Psi};
use crate::error::{Error, Result};
use crate::harness::{run_experiment, write_outputs, ExperimentSpec};
use crate::multiplier::select_bandwidth;
use crate::series::{Series, TiePolicy};
use crate::simgen::{generate, GeneratorSpec, Innovation, Model};
use crate::testrun::{run_test, MultiplierPolicy, TestConfig};
use clap::{Args, Parser, Subcommand};
use std::io::Read;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "stationarity",
    version,
    about = "CUSUM-based tests of time-series stationarity with a dependent multiplier bootstrap"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a series (CSV or one value per line) for stationarity.
    Test(TestArgs),
    /// Simulate a series from one of the study's models.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo experiment described by a config file.
    Experiment(ExperimentArgs),
    /// Report the data-driven multiplier bandwidth for a series.
    Bandwidth(BandwidthArgs),
}

#[derive(Args)]
struct TestArgs {
    /// Input file; '-' reads from stdin.
    #[arg(long)]
    input: String,
    /// 1-based CSV column to read (default: the whole line).
    #[arg(long)]
    column: Option<usize>,
    /// Test preset: d, c, dh, dc, dcp, m, v, a, va, mva.
    #[arg(long, default_value = "dc")]
    preset: String,
    /// Embedding dimension (lag h-1 is the largest examined).
    #[arg(long, default_value_t = 2)]
    h: usize,
    /// Bootstrap replicates M.
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Combining function: fisher or stouffer.
    #[arg(long, default_value = "fisher")]
    psi: String,
    /// Fixed multiplier half-width b_n (default: selected from the data).
    #[arg(long)]
    bandwidth: Option<usize>,
    /// Emit the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Reject tied observations instead of applying mid-ranks.
    #[arg(long)]
    strict_ties: bool,
    /// Resample every component with one shared multiplier set instead of
    /// per-component substreams.
    #[arg(long)]
    shared_multipliers: bool,
    /// Worker threads (default: all cores). Output is identical either way.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model id, e.g. N1, N8, A5, A9(0.8), D(3), S(0.9), DS(4,0.7).
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Model parameters, alternative to the parenthesized form.
    #[arg(long, num_args = 0.., allow_negative_numbers = true)]
    params: Vec<f64>,
    /// Innovation distribution: normal or t4.
    #[arg(long, default_value = "normal")]
    innovation: String,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for <name>.csv and <name>.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores). Output is identical either way.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct BandwidthArgs {
    /// Input file; '-' reads from stdin.
    #[arg(long)]
    input: String,
    #[arg(long)]
    column: Option<usize>,
    #[arg(long)]
    json: bool,
}

/// Parses and runs the CLI; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Bandwidth(args) => cmd_bandwidth(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_series(path: &str, column: Option<usize>) -> Result<Series> {
    if let Some(c) = column {
        if c == 0 {
            return Err(Error::Argument("--column is 1-based".into()));
        }
    }
    let content = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(path)?
    };
    let mut values = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let field = match column {
            None => line,
            Some(c) => line
                .split(',')
                .nth(c - 1)
                .map(str::trim)
                .ok_or_else(|| {
                    Error::Data(format!("line {}: no column {c} in '{line}'", idx + 1))
                })?,
        };
        let value: f64 = field.parse().map_err(|_| {
            let hint = if column.is_none() && line.contains(',') {
                "; use --column to pick a CSV column"
            } else {
                ""
            };
            Error::Data(format!(
                "line {}: '{field}' is not numeric{hint}",
                idx + 1
            ))
        })?;
        values.push(value);
    }
    Series::new(values)
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(k) => {
            if k == 0 {
                return Err(Error::Argument("--workers must be >= 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Argument(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn cmd_test(args: TestArgs) -> Result<()> {
    let series = read_series(&args.input, args.column)?;
    let cfg = TestConfig {
        preset: Preset::parse(&args.preset)?,
        h: args.h,
        replicates: args.replicates,
        seed: args.seed,
        psi: Psi::parse(&args.psi)?,
        bandwidth: args.bandwidth,
        tie_policy: if args.strict_ties {
            TiePolicy::Reject
        } else {
            TiePolicy::MidRank
        },
        multiplier_policy: if args.shared_multipliers {
            MultiplierPolicy::Shared
        } else {
            MultiplierPolicy::PerComponent
        },
    };
    let report = with_pool(args.workers, || run_test(&series, &cfg))??;
    let json = report.to_json();
    if let Some(path) = &args.output {
        std::fs::write(path, &json)?;
    }
    if args.json {
        println!("{json}");
        return Ok(());
    }
    println!(
        "stationarity test: preset {} (h = {}, M = {}, psi = {})",
        report.meta.preset, report.meta.h, report.meta.m, report.meta.psi
    );
    println!(
        "series: {} observations (n = {}), bandwidth b_n = {} ({}), seed {}",
        report.meta.series_len, report.meta.n, report.meta.b_n, report.meta.bandwidth_mode,
        report.meta.seed
    );
    println!();
    println!("{:<10} {:>14} {:>12} {:>12}", "component", "statistic", "p-value", "p x 100");
    for c in &report.components {
        println!(
            "{:<10} {:>14.6} {:>12.4} {:>12.2}",
            c.name,
            c.statistic,
            c.p,
            100.0 * c.p
        );
    }
    println!();
    if report.global.p == 0.0 {
        let res = 1.0 / report.meta.m as f64;
        println!(
            "global: W = {:.6}, p-value < {} (x 100: < {})",
            report.global.w,
            res,
            100.0 * res
        );
    } else {
        println!(
            "global: W = {:.6}, p-value = {} (x 100: {})",
            report.global.w,
            report.global.p,
            100.0 * report.global.p
        );
    }
    for w in &report.meta.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let model = if args.params.is_empty() {
        Model::parse(&args.model)?
    } else {
        Model::from_parts(args.model.trim(), &args.params)?
    };
    let series = generate(&GeneratorSpec {
        model,
        innovation: Innovation::parse(&args.innovation)?,
        n: args.n,
        seed: args.seed,
    })?;
    let mut out = String::with_capacity(series.len() * 20);
    for v in series.values() {
        out.push_str(&format!("{v}\n"));
    }
    print!("{out}");
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let spec = ExperimentSpec::parse(&text)?;
    let table = with_pool(args.workers, || run_experiment(&spec))?;
    let (csv_path, json_path) = write_outputs(&table, &args.out)?;
    eprintln!(
        "wrote {} rows to {} and {}",
        table.rows.len(),
        csv_path.display(),
        json_path.display()
    );
    if !table.errors.is_empty() {
        for e in &table.errors {
            eprintln!("cell {} ({}) failed: {}", e.cell, e.model, e.message);
        }
    }
    Ok(())
}

fn cmd_bandwidth(args: BandwidthArgs) -> Result<()> {
    let series = read_series(&args.input, args.column)?;
    let choice = select_bandwidth(&series)?;
    if args.json {
        #[derive(serde::Serialize)]
        struct Out<'a> {
            schema: u32,
            series_len: usize,
            #[serde(flatten)]
            choice: &'a crate::multiplier::BandwidthChoice,
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&Out {
                schema: 1,
                series_len: series.len(),
                choice: &choice
            })
            .expect("serialization cannot fail")
        );
        return Ok(());
    }
    println!(
        "n = {}, b_n = {} (l_n = {}), mode = auto",
        series.len(),
        choice.b_n,
        choice.ell_n()
    );
    if let Some(d) = choice.diagnostics {
        println!(
            "rho(1) = {:.4}, dependence excess = {:.3}, cap binding = {}, constant fallback = {}",
            d.rho1, d.dependence_excess, d.capped, d.fallback_constant
        );
    }
    Ok(())
}
