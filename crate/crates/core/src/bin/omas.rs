use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use omas_core::bounds::BoundMethod;
use omas_core::cli::{
    cmd_age_cdf, cmd_bounds, cmd_reproduce, cmd_simulate, log_spaced, AgeGrid, Figure, SweepSpec,
    DEFAULT_POINTS_PER_DECADE, DEFAULT_RATIO_MAX, DEFAULT_RATIO_MIN, DEFAULT_SEED,
};
use omas_core::params::ValueDistribution;
use omas_core::sim::{Algorithm, Measurement};

/// Estimation error in open multi-agent systems: lower bounds and simulations.
#[derive(Parser, Debug)]
#[command(name = "omas", version)]
struct Cli {
    /// Worker threads for simulations (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate lower bounds over a grid of agent counts and rate ratios.
    Bounds {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Comma-separated subset of ping, infection-matrix, infection-algebraic, relaxed.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<BoundMethod>>,
    },
    /// Estimate the steady-state error of gossip and/or the optimal estimator.
    Simulate {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value_t = AlgorithmChoice::Gossip)]
        algorithm: AlgorithmChoice,
    },
    /// Compare the empirical age-of-information CDF with the Ping and infection CDFs.
    AgeCdf {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Largest age on the grid (default 2 / lambda_c).
        #[arg(long)]
        grid_max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        grid_points: usize,
    },
    /// Regenerate the data series behind a figure.
    Reproduce {
        #[arg(value_parser = ["fig1", "fig2", "fig3"])]
        figure: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated agent counts.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    n_agents: Vec<usize>,
    /// Explicit comma-separated ratios lambda_c / lambda_r (overrides --ratio-range).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ratios: Option<Vec<f64>>,
    /// Log-spaced ratio range as MIN,MAX.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    ratio_range: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_POINTS_PER_DECADE)]
    points_per_decade: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda_r: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_sq: f64,
    #[arg(long, default_value_t = ValueDistribution::Normal)]
    value_dist: ValueDistribution,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, default_value_t = 1000)]
    replications: usize,
    /// Events per replication (default scales with the mixing time).
    #[arg(long)]
    events: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Average pre-event snapshots over the second half of each run.
    #[arg(long)]
    time_averaged: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AlgorithmChoice {
    Gossip,
    Optimal,
    Both,
}

impl SweepArgs {
    fn spec(&self) -> anyhow::Result<SweepSpec> {
        let ratios = match (&self.ratios, &self.ratio_range) {
            (Some(r), _) => r.clone(),
            (None, Some(range)) => {
                let [min, max] = range.as_slice() else {
                    bail!("--ratio-range takes MIN,MAX");
                };
                log_spaced(*min, *max, self.points_per_decade)?
            }
            (None, None) => {
                log_spaced(DEFAULT_RATIO_MIN, DEFAULT_RATIO_MAX, self.points_per_decade)?
            }
        };
        Ok(SweepSpec {
            n_agents: self.n_agents.clone(),
            ratios,
            lambda_r: self.lambda_r,
            sigma_sq: self.sigma_sq,
            value_dist: self.value_dist,
            ..SweepSpec::default()
        })
    }
}

impl SimArgs {
    fn apply(&self, spec: &mut SweepSpec) {
        spec.replications = self.replications;
        spec.events = self.events;
        spec.seed = self.seed;
        spec.measurement = if self.time_averaged {
            Measurement::TimeAveraged
        } else {
            Measurement::Snapshot
        };
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match cli.command {
        Command::Bounds { sweep, methods } => {
            let mut spec = sweep.spec()?;
            if let Some(m) = methods {
                spec.methods = m;
            }
            cmd_bounds(&spec, &mut out)?;
        }
        Command::Simulate {
            sweep,
            sim,
            algorithm,
        } => {
            let mut spec = sweep.spec()?;
            sim.apply(&mut spec);
            spec.algorithms = match algorithm {
                AlgorithmChoice::Gossip => vec![Algorithm::Gossip],
                AlgorithmChoice::Optimal => vec![Algorithm::Optimal],
                AlgorithmChoice::Both => vec![Algorithm::Gossip, Algorithm::Optimal],
            };
            cmd_simulate(&spec, &mut out)?;
        }
        Command::AgeCdf {
            sweep,
            sim,
            grid_max,
            grid_points,
        } => {
            let mut spec = sweep.spec()?;
            sim.apply(&mut spec);
            let grid = AgeGrid {
                max: grid_max,
                points: grid_points,
            };
            cmd_age_cdf(&spec, &grid, &mut out)?;
        }
        Command::Reproduce { figure, seed } => {
            let figure: Figure = figure.parse()?;
            cmd_reproduce(figure, seed, &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("omas: error: cannot start thread pool: {e}");
            std::process::exit(2);
        }
    }
    if let Err(e) = run(cli) {
        eprintln!("omas: error: {e:#}");
        std::process::exit(1);
    }
}
