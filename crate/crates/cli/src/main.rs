//! `coxlab`: analysis of single-server queues driven by CTMC-modulated Cox
//! arrival processes.
//!
//! Subcommands: `analyze` (chain structure), `sm-check` (supermodular-order
//! decrease scan), `sweep` (workload curve over modulation rates), `bounds`
//! (averaged/frozen environment bounds), `search` (randomized
//! counterexample hunt). See `--help` of each subcommand for defaults.

mod commands;
mod exit;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ctmc_core::NumericPolicy;
use order_lab::OrderPolicy;
use rand::Rng;

use commands::{Context, SearchInput, SmCheckInput, SweepInput};
use exit::CliError;
use input::{parse_c_list, parse_grid, parse_sampler};

#[derive(Parser)]
#[command(
    name = "coxlab",
    version,
    about = "Workload and dependence-order laboratory for CTMC-modulated Cox queues",
    after_help = "Exit codes: 0 ok/ordered/decreasing, 10 supermodular violation, \
                  11 curve violation suspected, 2 parse/config, 3 not irreducible, \
                  4 unstable, 1 internal."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed; when absent one is sampled and noted on stderr
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread cap, 0 = library default (results never depend on it)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Supermodular-order tolerance epsilon
    #[arg(long, global = true, default_value_t = 1e-9)]
    epsilon: f64,

    /// Cap on observation-grid dimension
    #[arg(long, global = true, default_value_t = 4)]
    dim_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Chain structure: stationary law, time-reversal, monotonicity, rate structure
    Analyze {
        /// Chain specification file (JSON)
        #[arg(long)]
        input: PathBuf,
    },
    /// Verify that dependence decreases in the modulation rate on the given grids
    SmCheck {
        /// Chain specification file (JSON)
        #[arg(long, required_unless_present = "pmf_pair")]
        input: Option<PathBuf>,
        /// Ascending modulation rates, comma separated
        #[arg(long, default_value = "0.5,1,2,4")]
        c_list: String,
        /// Observation grid (comma-separated times); repeatable
        /// [default: 0,1 and 0,0.5,1]
        #[arg(long = "grid")]
        grids: Vec<String>,
        /// Debug path: check a serialized pmf pair directly instead of a chain
        #[arg(long)]
        pmf_pair: Option<PathBuf>,
    },
    /// Evaluate the mean workload over a rate list and judge monotonicity
    Sweep {
        /// Chain + service specification file (JSON)
        #[arg(long)]
        input: PathBuf,
        /// Ascending modulation rates, comma separated
        #[arg(long, default_value = "0.05,0.25,1,4,20")]
        c_list: String,
        /// Evaluation method per point
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Simulation horizon in arrivals
        #[arg(long, default_value_t = 200_000)]
        arrivals: u64,
        /// Batch count for confidence intervals
        #[arg(long, default_value_t = 32)]
        batches: usize,
        /// Warm-up fraction discarded before statistics
        #[arg(long, default_value_t = 0.10)]
        warmup: f64,
        /// Simulate even when the queue is unstable
        #[arg(long)]
        allow_unstable: bool,
    },
    /// Averaged-environment and frozen-environment workload bounds
    Bounds {
        /// Chain + service specification file (JSON)
        #[arg(long)]
        input: PathBuf,
    },
    /// Sample random chains hunting for non-monotone chains with clean scans
    Search {
        /// States per sampled chain
        #[arg(long, default_value_t = 3)]
        states: usize,
        /// Number of random chains to draw
        #[arg(long, default_value_t = 100)]
        budget: usize,
        /// Ascending modulation rates, comma separated
        #[arg(long, default_value = "0.5,1,2,4")]
        c_list: String,
        /// Observation grid (comma-separated times); repeatable
        /// [default: 0,1 and 0,0.5,1]
        #[arg(long = "grid")]
        grids: Vec<String>,
        /// Off-diagonal rate sampler: exponential:MEAN or twopoint:LO,HI,P_HI
        #[arg(long, default_value = "exponential:1.0")]
        sampler: String,
        /// Intensities are sorted uniforms on (0, lambda-max)
        #[arg(long, default_value_t = 2.0)]
        lambda_max: f64,
        /// Debug path: inject chain files into the sample stream; repeatable
        #[arg(long)]
        inject: Vec<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    Auto,
    Qbd,
    Sim,
}

impl From<MethodArg> for queue_engine::CurveMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => queue_engine::CurveMethod::Auto,
            MethodArg::Qbd => queue_engine::CurveMethod::Qbd,
            MethodArg::Sim => queue_engine::CurveMethod::Sim,
        }
    }
}

fn default_grids(cap: usize) -> Result<Vec<ctmc_core::TimeGrid>, CliError> {
    Ok(vec![parse_grid("0,1", cap)?, parse_grid("0,0.5,1", cap)?])
}

fn grids_from_args(args: &[String], cap: usize) -> Result<Vec<ctmc_core::TimeGrid>, CliError> {
    if args.is_empty() {
        default_grids(cap)
    } else {
        args.iter().map(|g| parse_grid(g, cap)).collect()
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::parse(format!("thread pool: {e}")))?;
    }
    let seed = cli.seed.unwrap_or_else(|| {
        let sampled = rand::rng().random();
        eprintln!("note: --seed not given; sampled seed {sampled}");
        sampled
    });
    let numeric = NumericPolicy {
        grid_dim_cap: cli.dim_cap,
        ..NumericPolicy::default()
    };
    let order = OrderPolicy {
        epsilon: cli.epsilon,
        ..OrderPolicy::default()
    };
    let ctx = Context {
        seed,
        numeric,
        order,
        out: cli.out.clone(),
    };

    match &cli.command {
        Command::Analyze { input } => commands::cmd_analyze(&ctx, input),
        Command::SmCheck {
            input,
            c_list,
            grids,
            pmf_pair,
        } => {
            let args = SmCheckInput {
                input: input.clone(),
                pmf_pair: pmf_pair.clone(),
                c_list: parse_c_list(c_list)?,
                grids: grids_from_args(grids, cli.dim_cap)?,
            };
            commands::cmd_sm_check(&ctx, &args)
        }
        Command::Sweep {
            input,
            c_list,
            method,
            arrivals,
            batches,
            warmup,
            allow_unstable,
        } => {
            let args = SweepInput {
                input: input.clone(),
                c_list: parse_c_list(c_list)?,
                method: (*method).into(),
                arrivals: *arrivals,
                batches: *batches,
                warmup: *warmup,
                allow_unstable: *allow_unstable,
            };
            commands::cmd_sweep(&ctx, &args)
        }
        Command::Bounds { input } => commands::cmd_bounds(&ctx, input),
        Command::Search {
            states,
            budget,
            c_list,
            grids,
            sampler,
            lambda_max,
            inject,
        } => {
            let args = SearchInput {
                states: *states,
                budget: *budget,
                c_list: parse_c_list(c_list)?,
                grids: grids_from_args(grids, cli.dim_cap)?,
                sampler: parse_sampler(sampler)?,
                lambda_max: *lambda_max,
                inject: inject.clone(),
            };
            commands::cmd_search(&ctx, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code)
        }
    }
}
