use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use harness::acceptance;
use harness::record::results_root;
use harness::sweep::{sweep, write_csv, Grid};
use harness::{Experiment, ExperimentConfig, ProverMode, ResultRecord};
use qmaplus::property::TestMode;

#[derive(Parser)]
#[command(name = "qmaplus", about = "Simulate and audit the QMA+ protocols")]
struct Cli {
    /// Root directory for result records; defaults to $QMAPLUS_RESULTS or ./results.
    #[arg(long, global = true)]
    results: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// SSE protocol: honest completeness, or soundness with --adversarial.
    RunSse {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        adversarial: bool,
    },
    RunUg(Common),
    RunCsp(Common),
    SearchAdversary(Common),
    VerifyBounds(Common),
    VerifyGapMax(Common),
    AuditProductTest(Common),
    PcpIndex(Common),
    PcpVerify(Common),
    PcpAudit(Common),
    /// Run acceptance criteria 1–11.
    RunAllAcceptance,
    /// Evaluate a config over a parameter grid and write a CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample with this many trials instead of computing exactly.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Force the brute-force cross-check.
    #[arg(long)]
    oracle: bool,
    /// Print the record without writing it.
    #[arg(long)]
    no_write: bool,
}

impl Common {
    fn config(&self, experiment: Experiment) -> anyhow::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => ExperimentConfig::new(experiment),
        };
        c.experiment = experiment;
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(trials) = self.trials {
            c.mode = TestMode::MonteCarlo { seed: c.seed, trials };
        }
        if let Some(restarts) = self.restarts {
            c.prover = ProverMode::Adversarial { restarts };
        }
        c.oracle |= self.oracle;
        let p = &mut c.params;
        macro_rules! take {
            ($($f:ident),*) => { $(if self.$f.is_some() { p.$f = self.$f.clone(); })* };
        }
        take!(eps, k, delta, eta, q, theta, nu, n, d, samples, dims);
        Ok(c)
    }
}

fn report(record: &ResultRecord, root: &std::path::Path, write: bool) -> anyhow::Result<bool> {
    println!("{}", serde_json::to_string_pretty(record)?);
    if write {
        let path = record.write(root)?;
        eprintln!("wrote {}", path.display());
    }
    for c in record.failed_checks() {
        eprintln!("check failed: {} ({} vs {})", c.name, c.value, c.bound);
    }
    Ok(record.passed())
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let root = cli.results.unwrap_or_else(results_root);
    let (experiment, common) = match cli.command {
        Command::RunSse { common, adversarial } => {
            let e = if adversarial || common.restarts.is_some() { Experiment::SseSoundness } else { Experiment::SseCompleteness };
            let mut common = common;
            if adversarial && common.restarts.is_none() {
                common.restarts = Some(qmaplus::adversary::DEFAULT_RESTARTS);
            }
            (e, common)
        }
        Command::RunUg(c) => (Experiment::UgCompleteness, c),
        Command::RunCsp(c) => (Experiment::CspCompleteness, c),
        Command::SearchAdversary(c) => (Experiment::SearchAdversary, c),
        Command::VerifyBounds(c) => (Experiment::VerifyBounds, c),
        Command::VerifyGapMax(c) => (Experiment::VerifyGapMax, c),
        Command::AuditProductTest(c) => (Experiment::AuditProductTest, c),
        Command::PcpIndex(c) => (Experiment::PcpIndex, c),
        Command::PcpVerify(c) => (Experiment::PcpVerify, c),
        Command::PcpAudit(c) => (Experiment::PcpAudit, c),
        Command::RunAllAcceptance => {
            let outcomes = acceptance::run_all();
            for o in &outcomes {
                println!("{}", o.line());
            }
            return Ok(if outcomes.iter().all(|o| o.passed) { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Sweep { config, grid, out } => {
            let template = ExperimentConfig::load(&config)?;
            let grid: Grid = serde_json::from_str(&std::fs::read_to_string(&grid)?)?;
            let records = sweep(&template, &grid)?;
            write_csv(&grid, &records, File::create(&out)?)?;
            eprintln!("{} cells written to {}", records.len(), out.display());
            return Ok(if records.iter().all(ResultRecord::passed) { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    };
    let config = common.config(experiment)?;
    let record = harness::experiments::run(&config)?;
    let ok = report(&record, &root, !common.no_write)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
