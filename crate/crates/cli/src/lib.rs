//! File-level commands behind the `lowstar` binary.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use log::{info, warn};
use serde::Serialize;

use lowstar_core::{
    build_vietoris_rips, extract_pairs, extract_pairs_by_index, reduce, reduce_standard, sample, Algo, Barcode,
    BoundaryMatrix, Ensemble, Filtration, IterationTrace, PmsOptions, PointCloud, Reduction, Reference, TraceSink,
};

/// Filtration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildParams {
    pub r_max: f64,
    pub divisions: usize,
    pub max_dim: usize,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            r_max: 5.0,
            divisions: 10,
            max_dim: 5,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn cmd_sample(ensemble: Ensemble, n: usize, seed: u64, jitter: f64, out: &Path) -> Result<PointCloud> {
    let cloud = sample(ensemble, n, seed, jitter)?;
    let mut w = create(out)?;
    cloud.write_csv(&mut w)?;
    w.flush()?;
    Ok(cloud)
}

/// Reads a cloud, writes its boundary matrix and optionally the filtration.
pub fn cmd_build(input: &Path, params: BuildParams, out: &Path, filtration_out: Option<&Path>) -> Result<Filtration> {
    let cloud = PointCloud::read_csv(open(input)?).with_context(|| format!("parsing {}", input.display()))?;
    let filtration = build_vietoris_rips(&cloud, params.r_max, params.divisions, params.max_dim)?;
    let matrix = filtration.boundary_matrix();
    let mut w = create(out)?;
    matrix.write_text(&mut w)?;
    w.flush()?;
    if let Some(path) = filtration_out {
        let mut w = create(path)?;
        filtration.write_text(&mut w)?;
        w.flush()?;
    }
    Ok(filtration)
}

pub fn read_matrix(path: &Path) -> Result<BoundaryMatrix> {
    BoundaryMatrix::read_text(open(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_filtration(path: &Path) -> Result<Filtration> {
    Filtration::read_text(open(path)?).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, Default)]
pub struct ReduceArgs {
    pub matrix: PathBuf,
    pub algo: Option<Algo>,
    pub pms: PmsOptions,
    pub trace_out: Option<PathBuf>,
    pub barcode_out: Option<PathBuf>,
    /// Supplies scales for the barcode; without it births and deaths are
    /// simplex indices.
    pub filtration: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ReduceOutcome {
    pub reduction: Reduction,
    pub trace: Option<IterationTrace>,
    /// `None` when a partial low vector is not injective.
    pub barcode: Option<Barcode>,
}

/// Reduces a matrix file. A trace is scored against the standard reduction,
/// computed first.
pub fn cmd_reduce(args: &ReduceArgs) -> Result<ReduceOutcome> {
    let algo = args.algo.unwrap_or(Algo::Pms);
    let mut matrix = read_matrix(&args.matrix)?;
    let filtration = args.filtration.as_deref().map(read_filtration).transpose()?;
    if let Some(f) = &filtration {
        anyhow::ensure!(
            f.len() == matrix.size() && f.boundary_matrix() == matrix,
            "filtration does not match the matrix"
        );
    }
    let dims = matrix.dims().to_vec();

    let mut sink = match &args.trace_out {
        Some(_) => {
            let star = reduce_standard(&mut matrix.clone(), &mut TraceSink::disabled(Algo::Standard)).low;
            TraceSink::new(algo, Some(Arc::new(Reference::from_lowstar(star))))
        }
        None => TraceSink::disabled(algo),
    };
    let started = Instant::now();
    let reduction = reduce(algo, &mut matrix, &args.pms, &mut sink)?;
    info!(
        "{algo}: {} iterations, {} column additions, {:.3?}",
        reduction.iterations,
        reduction.total_col_adds,
        started.elapsed()
    );

    let trace = args.trace_out.as_ref().map(|_| sink.into_trace());
    if let (Some(path), Some(trace)) = (&args.trace_out, &trace) {
        let mut w = create(path)?;
        trace.write_csv(&mut w)?;
        w.flush()?;
    }

    let barcode = match &filtration {
        Some(f) => extract_pairs(f, &reduction.low),
        None => extract_pairs_by_index(&reduction.low, &dims),
    };
    let barcode = match barcode {
        Ok(b) => Some(b),
        Err(e) if !reduction.converged => {
            warn!("no barcode for the partial reduction: {e}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    if let (Some(path), Some(b)) = (&args.barcode_out, &barcode) {
        let mut w = create(path)?;
        b.write_text(&mut w)?;
        w.flush()?;
    }
    Ok(ReduceOutcome {
        reduction,
        trace,
        barcode,
    })
}

#[derive(Debug, Clone)]
pub struct BenchArgs {
    pub ensemble: Ensemble,
    pub n: usize,
    pub seeds: Vec<u64>,
    pub jitter: f64,
    pub build: BuildParams,
    pub pms: PmsOptions,
    pub out_dir: PathBuf,
}

/// Final totals and threshold crossings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub ensemble: String,
    pub seed: u64,
    pub algo: String,
    pub m: usize,
    pub nnz: usize,
    pub converged: bool,
    pub iterations: usize,
    pub col_adds: u64,
    pub xor_ops: u64,
    /// First iteration with relative error at most 0.01.
    pub iter_rel_err_1pct: Option<usize>,
    /// First iterations with at least 50% and 99% of columns certified.
    pub iter_certified_50pct: Option<usize>,
    pub iter_certified_99pct: Option<usize>,
    /// First iterations with essential precision at least 0.95 and exactly 1.
    pub iter_precision_95pct: Option<usize>,
    pub iter_precision_exact: Option<usize>,
}

impl RunSummary {
    fn new(ensemble: Ensemble, seed: u64, matrix: &BoundaryMatrix, reduction: &Reduction, trace: &IterationTrace, algo: Algo) -> Self {
        Self {
            ensemble: ensemble.to_string(),
            seed,
            algo: algo.to_string(),
            m: matrix.size(),
            nnz: matrix.nnz(),
            converged: reduction.converged,
            iterations: reduction.iterations,
            col_adds: reduction.total_col_adds,
            xor_ops: reduction.total_xor_ops,
            iter_rel_err_1pct: trace.iters_to_rel_error(0.01),
            iter_certified_50pct: trace.iters_to_unreduced(0.5),
            iter_certified_99pct: trace.iters_to_unreduced(0.01),
            iter_precision_95pct: trace.iters_to_precision(0.95),
            iter_precision_exact: trace.iters_to_precision(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub runs: Vec<RunSummary>,
    /// Total column additions of pms over std and over twist.
    pub ratio_pms_std: f64,
    pub ratio_pms_twist: f64,
}

impl SeedSummary {
    pub fn run(&self, algo: Algo) -> &RunSummary {
        self.runs
            .iter()
            .find(|r| r.algo == algo.as_str())
            .expect("every algorithm runs once per seed")
    }
}

pub fn trace_file_name(ensemble: Ensemble, seed: u64, algo: Algo) -> String {
    format!("{ensemble}-seed{seed}-{algo}.csv")
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        if a == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        a as f64 / b as f64
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn write_summary(path: &Path, args: &BenchArgs, seeds: &[SeedSummary]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(
        w,
        "# {} n={} r_max={} divisions={} max_dim={} jitter={}",
        args.ensemble, args.n, args.build.r_max, args.build.divisions, args.build.max_dim, args.jitter
    )?;
    writeln!(
        w,
        "# pms: max_iter={} cap={} policy={} compress_clear={}",
        if args.pms.max_iter == usize::MAX { "none".to_string() } else { args.pms.max_iter.to_string() },
        args.pms.processor_cap.map_or_else(|| "none".into(), |c| c.to_string()),
        args.pms.schedule_policy.as_str(),
        args.pms.enable_compression_clearing
    )?;
    writeln!(w, "# xor_ops counts merge positions holding a nonzero in either operand")?;
    writeln!(w, "# std/twist iterations are visited columns (twist counts cleared columns it visits); pms iteration 0 is phase 0")?;
    writeln!(w, "# certified: pivot, cleared, reduced to zero, initially empty, or visited by a sequential sweep")?;
    writeln!(w)?;
    writeln!(w, "seed  algo   m      nnz     iters  col_adds  xor_ops    err<=1%  cert50  cert99  prec95  prec1")?;
    for s in seeds {
        for r in &s.runs {
            writeln!(
                w,
                "{:<5} {:<6} {:<6} {:<7} {:<6} {:<9} {:<10} {:<8} {:<7} {:<7} {:<7} {}{}",
                r.seed,
                r.algo,
                r.m,
                r.nnz,
                r.iterations,
                r.col_adds,
                r.xor_ops,
                opt(r.iter_rel_err_1pct),
                opt(r.iter_certified_50pct),
                opt(r.iter_certified_99pct),
                opt(r.iter_precision_95pct),
                opt(r.iter_precision_exact),
                if r.converged { "" } else { "  partial" }
            )?;
        }
    }
    writeln!(w)?;
    writeln!(w, "seed  pms/std  pms/twist")?;
    for s in seeds {
        writeln!(w, "{:<5} {:<8.4} {:.4}", s.seed, s.ratio_pms_std, s.ratio_pms_twist)?;
    }
    w.flush()?;
    Ok(())
}

/// Samples one cloud per seed and reduces it with every algorithm.
///
/// Writes one trace per seed and algorithm, `summary.txt` and
/// `summary.jsonl` (one object per run) into `out_dir`. Output depends only
/// on the arguments, not on the worker count.
pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<SeedSummary>> {
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let mut seeds = Vec::with_capacity(args.seeds.len());
    for &seed in &args.seeds {
        let cloud = sample(args.ensemble, args.n, seed, args.jitter)?;
        let filtration = build_vietoris_rips(&cloud, args.build.r_max, args.build.divisions, args.build.max_dim)?;
        let matrix = filtration.boundary_matrix();
        info!("seed {seed}: m={} nnz={}", matrix.size(), matrix.nnz());
        let star = reduce_standard(&mut matrix.clone(), &mut TraceSink::disabled(Algo::Standard)).low;
        let reference = Arc::new(Reference::from_lowstar(star));

        let mut runs = Vec::with_capacity(3);
        for algo in Algo::ALL {
            let mut sink = TraceSink::new(algo, Some(reference.clone()));
            let started = Instant::now();
            let reduction = reduce(algo, &mut matrix.clone(), &args.pms, &mut sink)?;
            info!("seed {seed} {algo}: {:.3?}", started.elapsed());
            let trace = sink.into_trace();
            let mut w = create(&args.out_dir.join(trace_file_name(args.ensemble, seed, algo)))?;
            trace.write_csv(&mut w)?;
            w.flush()?;
            runs.push(RunSummary::new(args.ensemble, seed, &matrix, &reduction, &trace, algo));
        }
        let adds = |a: Algo| runs.iter().find(|r| r.algo == a.as_str()).unwrap().col_adds;
        seeds.push(SeedSummary {
            seed,
            ratio_pms_std: ratio(adds(Algo::Pms), adds(Algo::Standard)),
            ratio_pms_twist: ratio(adds(Algo::Pms), adds(Algo::Twist)),
            runs,
        });
    }

    write_summary(&args.out_dir.join("summary.txt"), args, &seeds)?;
    let mut w = create(&args.out_dir.join("summary.jsonl"))?;
    for s in &seeds {
        for r in &s.runs {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(seeds)
}
