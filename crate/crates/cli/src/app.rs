use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::commands;
use crate::config::{keys_help, ExperimentConfig};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "slitsim",
    version,
    about = "Classical particles through a charged slit, with a discrete time step"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one ensemble; write distribution.csv and report.txt.
    Simulate(Common),
    /// Run the ensemble once per tau_list entry; write per-step
    /// distributions, sweep_report.csv and sweep_pairs.csv.
    SweepTau(Common),
    /// Draw swept trajectories; write trajectories.csv and trajectories.svg.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Refuse to record paths (trace then fails).
        #[arg(long)]
        no_record: bool,
    },
    /// Report extrema of an emitted distribution CSV; write extrema.csv.
    Analyze {
        /// Distribution CSV written by simulate or sweep-tau.
        csv: PathBuf,
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long, default_value_t = 5.0)]
        k_sigma: f64,
        /// Directory for extrema.csv (default: next to the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Config file of key = value lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trajectory count (trace_n for trace, n otherwise).
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

impl Common {
    /// Loads the config (or defaults) and applies command-line overrides.
    pub fn resolve(&self, trace: bool) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if let Some(n) = self.n {
            if trace {
                cfg.trace_n = n;
            } else {
                cfg.n = n;
            }
        }
        if let Some(t) = self.tau {
            cfg.tau = t;
        }
        Ok(cfg)
    }
}

pub fn parse_args<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = Cli::command()
        .after_long_help(keys_help())
        .try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

/// Executes a parsed command, returning the text for standard output.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Simulate(c) => {
            let cfg = c.resolve(false)?;
            let out = commands::simulate(&cfg)?;
            let h = &out.histogram;
            Ok(format!(
                "{} emitted, {} detected, {} blocked, {} escaped, {} step-limited; {} maxima\nwrote {}\n",
                h.n_emitted,
                h.n_detected,
                h.n_blocked,
                h.n_escaped,
                h.n_steplimit,
                out.extrema.maxima.len(),
                out.distribution.display()
            ))
        }
        Command::SweepTau(c) => {
            let cfg = c.resolve(false)?;
            let out = commands::sweep_tau(&cfg)?;
            let mut s = format!(
                "{:>10} {:>10} {:>8} {:>12}\n",
                "tau", "detected", "maxima", "osc_index"
            );
            for r in &out.rows {
                s += &format!(
                    "{:>10} {:>10} {:>8} {:>12.6}\n",
                    r.tau, r.n_detected, r.n_maxima, r.oscillation_index
                );
            }
            for &(i, j, tv) in &out.pairs {
                s += &format!("TV({}, {}) = {tv:.6}\n", out.rows[i].tau, out.rows[j].tau);
            }
            Ok(s)
        }
        Command::Trace { common, no_record } => {
            let mut cfg = common.resolve(true)?;
            if *no_record {
                cfg.record = false;
            }
            let out = commands::trace(&cfg)?;
            let detected = out
                .traces
                .iter()
                .filter(|t| t.outcome.is_detected())
                .count();
            Ok(format!(
                "{} trajectories, {} detected\nwrote {} and {}\n",
                out.traces.len(),
                detected,
                out.csv.display(),
                out.svg.display()
            ))
        }
        Command::Analyze {
            csv,
            window,
            k_sigma,
            out,
        } => {
            let dir = match out {
                Some(d) => d.clone(),
                None => csv.parent().map(PathBuf::from).unwrap_or_default(),
            };
            let res = commands::analyze(csv, *window, *k_sigma, &dir)?;
            Ok(crate::output::extrema_table(&res.report))
        }
    }
}
