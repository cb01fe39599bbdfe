//! `mapq`: batch pricing runs, convergence sweeps and the example registry.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mapq_core::experiment::{entry, registry, run, sweep, ExperimentConfig, Method, PriceReport};
use mapq_core::optimal_damping;

use crate::config::{default_budgets, load_configs, parse_budgets};
use crate::output::{write_json, write_sweep_csv, Sink};

#[derive(Parser)]
#[command(name = "mapq", version, about = "Damped Fourier pricing of multi-asset European options")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// JSON file holding one experiment or an array of experiments.
    #[arg(long, conflicts_with = "example")]
    config: Option<PathBuf>,
    /// Registry example (1-36) instead of a config file.
    #[arg(long, required_unless_present = "config")]
    example: Option<u32>,
    /// Method used with --example.
    #[arg(long, default_value = "ASGQ")]
    method: Method,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Price each experiment and emit JSON reports.
    Price {
        #[command(flatten)]
        source: Source,
        /// Overrides the method budget (TP/SM level, ASGQ evaluations, MC
        /// samples, COS modes).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run a convergence sweep and emit CSV.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Comma-separated, strictly increasing budgets.
        #[arg(long)]
        budget: Option<String>,
    },
    /// Emit the example registry as JSON.
    Registry {
        #[arg(long)]
        out: Option<PathBuf>,
        /// A single entry.
        #[arg(long)]
        id: Option<u32>,
    },
    /// Compute optimal damping vectors and emit JSON.
    OptimizeDamping {
        #[command(flatten)]
        source: Source,
    },
}

fn experiments(source: &Source) -> Result<Vec<ExperimentConfig>> {
    let mut configs = match (&source.config, source.example) {
        (Some(path), _) => load_configs(path)?,
        (None, Some(id)) => {
            let e = entry(id).with_context(|| format!("no registry example {id}"))?;
            vec![ExperimentConfig::from_entry(&e, source.method)]
        }
        (None, None) => bail!("either --config or --example is required"),
    };
    if let Some(seed) = source.seed {
        for c in &mut configs {
            c.options.seed = seed;
        }
    }
    Ok(configs)
}

fn label(c: &ExperimentConfig, i: usize) -> String {
    c.name.clone().unwrap_or_else(|| format!("experiment {}", i + 1))
}

fn price(source: &Source, budget: Option<u64>) -> Result<()> {
    let mut reports: Vec<PriceReport> = Vec::new();
    for (i, c) in experiments(source)?.iter().enumerate() {
        let c = match budget {
            Some(b) => c.with_budget(b)?,
            None => c.clone(),
        };
        let r = run(&c).with_context(|| format!("{} ({})", label(&c, i), c.method))?;
        log::info!("{}: {} = {:.8} in {:.3}s", label(&c, i), c.method, r.estimate, r.wall_time_s);
        reports.push(r);
    }
    write_json(&Sink::new(source.out.as_deref()), &reports)
}

fn run_sweep(source: &Source, budget: Option<&str>) -> Result<()> {
    let configs = experiments(source)?;
    let batch = configs.len() > 1;
    if batch && source.out.is_none() {
        bail!("a batch sweep needs --out; one CSV is written per experiment");
    }
    for (i, c) in configs.iter().enumerate() {
        let budgets = match budget {
            Some(s) => parse_budgets(s)?,
            None => default_budgets(c),
        };
        let rows = sweep(c, &budgets).with_context(|| format!("{} ({})", label(c, i), c.method))?;
        let sink = match (&source.out, batch) {
            (Some(p), true) => Sink::numbered(p, i + 1),
            (p, _) => Sink::new(p.as_deref()),
        };
        write_sweep_csv(&sink, &rows)?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct DampingReport {
    name: Option<String>,
    damping: Vec<f64>,
    log_peak: f64,
    iterations: usize,
    converged: bool,
}

fn optimize(source: &Source) -> Result<()> {
    let mut out = Vec::new();
    for (i, c) in experiments(source)?.iter().enumerate() {
        let o = optimal_damping(&c.model, &c.payoff, &c.options.optimizer).with_context(|| label(c, i))?;
        out.push(DampingReport {
            name: c.name.clone(),
            damping: o.damping.as_slice().to_vec(),
            log_peak: o.log_peak,
            iterations: o.iterations,
            converged: o.converged,
        });
    }
    write_json(&Sink::new(source.out.as_deref()), &out)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Price { source, budget } => price(&source, budget),
        Command::Sweep { source, budget } => run_sweep(&source, budget.as_deref()),
        Command::Registry { out, id } => {
            let sink = Sink::new(out.as_deref());
            match id {
                Some(id) => write_json(&sink, &entry(id).with_context(|| format!("no registry example {id}"))?),
                None => write_json(&sink, &registry()),
            }
        }
        Command::OptimizeDamping { source } => optimize(&source),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
