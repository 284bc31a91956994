use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use lowstar_cli::{cmd_bench, cmd_build, cmd_reduce, cmd_sample, BenchArgs, BuildParams, ReduceArgs};
use lowstar_core::ensembles::DEFAULT_JITTER;
use lowstar_core::{Algo, Ensemble, Execution, PmsOptions, SchedulePolicy};

/// Persistent homology by boundary matrix reduction.
///
/// Exit status: 0 when the reduction reached its fixpoint, 2 when the
/// parallel reducer stopped at --max-iter, 1 on error.
#[derive(Parser, Debug)]
#[command(name = "lowstar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a point cloud and write it as CSV
    Sample {
        /// gaussian3d, figure8, trefoil or sphere_product
        ensemble: Ensemble,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        seed: u64,
        out: PathBuf,
        /// Noise on the curve ensembles
        #[arg(long, default_value_t = DEFAULT_JITTER)]
        jitter: f64,
    },
    /// Build the Vietoris-Rips boundary matrix of a point cloud
    Build {
        input: PathBuf,
        out: PathBuf,
        #[command(flatten)]
        params: BuildFlags,
        /// Also write the filtration (index dim scale vertices...)
        #[arg(long)]
        filtration_out: Option<PathBuf>,
    },
    /// Reduce a boundary matrix
    Reduce {
        matrix: PathBuf,
        #[arg(long, default_value = "pms")]
        algo: Algo,
        #[command(flatten)]
        pms: PmsFlags,
        /// Per-iteration trace CSV, scored against the standard reduction
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Barcode output: `birth death dim` per line, `inf` for essential classes
        #[arg(long)]
        barcode: Option<PathBuf>,
        /// Filtration file giving barcode scales; indices are used without it
        #[arg(long)]
        filtration: Option<PathBuf>,
    },
    /// Reduce sampled complexes with every algorithm and summarise
    Bench {
        ensemble: Ensemble,
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// First seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of consecutive seeds
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = DEFAULT_JITTER)]
        jitter: f64,
        #[command(flatten)]
        params: BuildFlags,
        #[command(flatten)]
        pms: PmsFlags,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct BuildFlags {
    #[arg(long, default_value_t = 5.0)]
    r_max: f64,
    #[arg(long, default_value_t = 10)]
    divisions: usize,
    #[arg(long, default_value_t = 5)]
    max_dim: usize,
}

impl From<BuildFlags> for BuildParams {
    fn from(f: BuildFlags) -> Self {
        BuildParams {
            r_max: f.r_max,
            divisions: f.divisions,
            max_dim: f.max_dim,
        }
    }
}

#[derive(Args, Debug)]
struct PmsFlags {
    /// Stop the parallel reducer after this many iterations
    #[arg(long)]
    max_iter: Option<usize>,
    /// Neighbourhoods reduced per iteration
    #[arg(long)]
    processor_cap: Option<usize>,
    /// all, big-nbhd or neg-first
    #[arg(long, default_value = "all")]
    policy: SchedulePolicy,
    /// Enable clearing by compression
    #[arg(long)]
    compress_clear: bool,
    /// Run Phase II on this many threads instead of simulating serially
    #[arg(long)]
    workers: Option<usize>,
}

impl From<PmsFlags> for PmsOptions {
    fn from(f: PmsFlags) -> Self {
        PmsOptions {
            max_iter: f.max_iter.unwrap_or(usize::MAX),
            enable_compression_clearing: f.compress_clear,
            processor_cap: f.processor_cap,
            schedule_policy: f.policy,
            execution: f
                .workers
                .map_or(Execution::Simulated, |workers| Execution::Parallel { workers }),
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sample {
            ensemble,
            n,
            seed,
            out,
            jitter,
        } => {
            let cloud = cmd_sample(ensemble, n as usize, seed, jitter, &out)?;
            println!("{} points in R^{} -> {}", cloud.len(), cloud.dim(), out.display());
        }
        Command::Build {
            input,
            out,
            params,
            filtration_out,
        } => {
            let f = cmd_build(&input, params.into(), &out, filtration_out.as_deref())?;
            let m = f.boundary_matrix();
            println!("m={} nnz={}", m.size(), m.nnz());
        }
        Command::Reduce {
            matrix,
            algo,
            pms,
            trace,
            barcode,
            filtration,
        } => {
            let args = ReduceArgs {
                matrix,
                algo: Some(algo),
                pms: pms.into(),
                trace_out: trace,
                barcode_out: barcode,
                filtration,
            };
            let out = cmd_reduce(&args)?;
            let r = &out.reduction;
            println!(
                "algo={algo} converged={} iterations={} col_adds={} xor_ops={} cleared={}",
                r.converged,
                r.iterations,
                r.total_col_adds,
                r.total_xor_ops,
                r.cleared.len()
            );
            if let Some(b) = &out.barcode {
                println!("intervals={} essential={}", b.intervals.len(), b.essential().count());
            }
            if !r.converged {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Bench {
            ensemble,
            n,
            seed,
            seeds,
            jitter,
            params,
            pms,
            out,
        } => {
            let args = BenchArgs {
                ensemble,
                n: n as usize,
                seeds: (seed..seed + seeds).collect(),
                jitter,
                build: params.into(),
                pms: pms.into(),
                out_dir: out,
            };
            let summary = cmd_bench(&args)?;
            print!("{}", std::fs::read_to_string(args.out_dir.join("summary.txt"))?);
            let partial = summary
                .iter()
                .flat_map(|s| &s.runs)
                .any(|r| !r.converged);
            if partial {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
