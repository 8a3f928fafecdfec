use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rdregion::commands::{self, Output, RegionArgs, SimulateArgs, WynerZivArgs};
use rdregion::model::{load_model, load_pair};
use rdregion::{CliError, Result};
use rdregion_core::optimizer::Objective;

/// Rate-distortion regions for three sources with decoder side information.
#[derive(Parser, Debug)]
#[command(name = "rdregion", version)]
struct Cli {
    /// Worker threads (default: all cores). RD_REGION_THREADS overrides it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Network-structure residuals and converse identities as JSON.
    Check {
        model: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Channel file, or `identity`, `constant`, `symmetric:<p>`.
        #[arg(long)]
        channels: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Grid search for the frontier at given distortion targets, as CSV.
    Region {
        model: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        /// |W1|,|W2|,|W3| (default |X_i|+1).
        #[arg(long, value_parser = parse_sizes)]
        w_sizes: Option<[usize; 3]>,
        /// D1,D2,D3 or a single value for all three.
        #[arg(long, value_parser = parse_triple)]
        distortion: [f64; 3],
        #[arg(long, default_value = "min_sum_rate", value_parser = parse_objective)]
        objective: Objective,
        #[arg(long, default_value_t = 0)]
        refine_iters: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monte Carlo run of the random-binning scheme, as JSON.
    Simulate {
        model: PathBuf,
        /// Channel file, or `identity`, `constant`, `symmetric:<p>`.
        #[arg(long)]
        channels: Option<String>,
        #[arg(long)]
        n: usize,
        /// Bin rates R1,R2,R3 (or one value).
        #[arg(long, value_parser = parse_triple)]
        rates: [f64; 3],
        /// Codebook rates R'1,R'2,R'3 (or one value).
        #[arg(long, value_parser = parse_triple)]
        rates_prime: [f64; 3],
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Single-source rate-distortion curve with side information, as CSV.
    WynerZiv {
        model: PathBuf,
        /// `d1,d2,...` or `start:stop:step`.
        #[arg(long)]
        distortion_grid: String,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long, default_value_t = 3)]
        w_size: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [a] => Ok([a; 3]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(format!("expected one or three comma-separated values, got {}", v.len())),
    }
}

fn parse_sizes(s: &str) -> std::result::Result<[usize; 3], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [a] => Ok([a; 3]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(format!("expected one or three sizes, got {}", v.len())),
    }
}

fn parse_objective(s: &str) -> std::result::Result<Objective, String> {
    Objective::parse(s).map_err(|e| e.to_string())
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var("RD_REGION_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Input(format!("RD_REGION_THREADS=`{v}` is not a thread count"))),
        _ => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<(Output, Option<PathBuf>)> {
    if let Some(n) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("cannot start {n} threads: {e}")))?;
    }
    Ok(match cli.cmd {
        Cmd::Check {
            model,
            tol,
            channels,
            out,
        } => (commands::check(&load_model(&model)?, channels.as_deref(), tol)?, out.out),
        Cmd::Region {
            model,
            grid_step,
            w_sizes,
            distortion,
            objective,
            refine_iters,
            out,
        } => {
            let args = RegionArgs {
                grid_step,
                w_sizes,
                distortion,
                objective,
                refine_iters,
            };
            (commands::region(&load_model(&model)?, &args)?, out.out)
        }
        Cmd::Simulate {
            model,
            channels,
            n,
            rates,
            rates_prime,
            epsilon,
            trials,
            seed,
            out,
        } => {
            let args = SimulateArgs {
                channels,
                n,
                rates,
                rates_prime,
                epsilon,
                trials,
                seed,
            };
            (commands::simulate(&load_model(&model)?, &args)?, out.out)
        }
        Cmd::WynerZiv {
            model,
            distortion_grid,
            grid_step,
            w_size,
            out,
        } => {
            let args = WynerZivArgs {
                levels: commands::parse_levels(&distortion_grid)?,
                grid_step,
                w_size,
            };
            (commands::wyner_ziv(&load_pair(&model)?, &args)?, out.out)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, path)) => {
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            let written = match &path {
                Some(p) => std::fs::write(p, &output.body).map_err(|e| format!("{}: {e}", p.display())),
                None => std::io::stdout()
                    .write_all(output.body.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(output.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
