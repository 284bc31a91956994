//! Per-iteration instrumentation shared by every reducer.
//!
//! An iteration is one pass of a reducer's outermost loop: one column for the
//! sequential sweeps, one Phase I + Phase II round for the parallel reducer.
//! Column additions are the unit of work; XOR counts are tallied with the
//! merge-cost convention of [`crate::boundary::xor_into`], where a shared
//! index (`1+1`) counts once.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use crate::boundary::LowVector;
use crate::error::{Error, Result};

/// Column-addition and XOR tallies, for the current iteration and cumulative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraceCounters {
    pub col_adds: u64,
    pub xor_ops: u64,
    pub col_adds_cum: u64,
    pub xor_ops_cum: u64,
}

impl TraceCounters {
    pub fn record_addition(&mut self, xor_ops: u64) {
        self.col_adds += 1;
        self.xor_ops += xor_ops;
        self.col_adds_cum += 1;
        self.xor_ops_cum += xor_ops;
    }

    /// Folds a worker's tallies into these.
    pub fn merge(&mut self, other: &TraceCounters) {
        self.col_adds += other.col_adds;
        self.xor_ops += other.xor_ops;
        self.col_adds_cum += other.col_adds_cum;
        self.xor_ops_cum += other.xor_ops_cum;
    }

    /// Resets the per-iteration tallies, keeping the cumulative ones.
    pub fn start_iteration(&mut self) {
        self.col_adds = 0;
        self.xor_ops = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Standard,
    Twist,
    Pms,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Standard, Algo::Twist, Algo::Pms];

    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Standard => "std",
            Algo::Twist => "twist",
            Algo::Pms => "pms",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std" | "standard" => Ok(Algo::Standard),
            "twist" => Ok(Algo::Twist),
            "pms" => Ok(Algo::Pms),
            other => Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Ground truth against which traces are scored, derived from an exact `lowstar`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reference {
    lowstar: LowVector,
    essential: Vec<bool>,
    n_essential: usize,
    norm: u64,
}

impl Reference {
    pub fn from_lowstar(lowstar: LowVector) -> Self {
        let essential = essential_mask(&lowstar);
        let n_essential = essential.iter().filter(|&&e| e).count();
        let norm = lowstar.as_slice().iter().map(|&v| v as u64).sum();
        Self {
            lowstar,
            essential,
            n_essential,
            norm,
        }
    }

    pub fn lowstar(&self) -> &LowVector {
        &self.lowstar
    }

    pub fn is_essential(&self, j: usize) -> bool {
        self.essential[j - 1]
    }

    /// Essential indices, ascending.
    pub fn essential(&self) -> Vec<usize> {
        (1..=self.essential.len())
            .filter(|&j| self.essential[j - 1])
            .collect()
    }

    pub fn n_essential(&self) -> usize {
        self.n_essential
    }
}

/// `mask[j - 1]` is true iff column `j` is positive and never paired.
pub fn essential_mask(lowstar: &LowVector) -> Vec<bool> {
    let mut mask: Vec<bool> = lowstar.as_slice().iter().map(|&v| v == 0).collect();
    for &row in lowstar.as_slice() {
        if row > 0 {
            mask[row - 1] = false;
        }
    }
    mask
}

/// `|low - lowstar|_1 / |lowstar|_1`.
///
/// When `lowstar` is all zero the ratio is 0 if the vectors agree and
/// `f64::INFINITY` otherwise.
pub fn rel_l1_error(low: &LowVector, lowstar: &LowVector) -> Result<f64> {
    if low.len() != lowstar.len() {
        return Err(Error::LengthMismatch {
            left: low.len(),
            right: lowstar.len(),
        });
    }
    let diff: u64 = low
        .as_slice()
        .iter()
        .zip(lowstar.as_slice())
        .map(|(&a, &b)| a.abs_diff(b) as u64)
        .sum();
    let norm: u64 = lowstar.as_slice().iter().map(|&v| v as u64).sum();
    Ok(ratio(diff, norm))
}

fn ratio(diff: u64, norm: u64) -> f64 {
    match (diff, norm) {
        (0, _) => 0.0,
        (_, 0) => f64::INFINITY,
        _ => diff as f64 / norm as f64,
    }
}

/// Fraction of columns whose final low is not yet certified.
pub fn unreduced_proportion(resolved: &[bool]) -> f64 {
    if resolved.is_empty() {
        return 0.0;
    }
    let open = resolved.iter().filter(|&&r| !r).count();
    open as f64 / resolved.len() as f64
}

/// `|truth| / |estimate|` for an essential-set estimate that must contain `truth`.
///
/// Both empty gives 1.
pub fn essential_precision(estimate: &[usize], truth: &[usize]) -> Result<f64> {
    let est: std::collections::HashSet<usize> = estimate.iter().copied().collect();
    if let Some(&missing) = truth.iter().find(|t| !est.contains(t)) {
        return Err(Error::EstimateMissesTruth(missing));
    }
    if est.is_empty() {
        return Ok(1.0);
    }
    let truth: std::collections::HashSet<usize> = truth.iter().copied().collect();
    Ok(truth.len() as f64 / est.len() as f64)
}

/// A superset of the essential columns that only ever shrinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialEstimate {
    member: Vec<bool>,
    len: usize,
}

impl EssentialEstimate {
    /// Starts from every column.
    pub fn full(m: usize) -> Self {
        Self {
            member: vec![true; m],
            len: m,
        }
    }

    pub fn contains(&self, j: usize) -> bool {
        self.member[j - 1]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Returns true if `j` was a member.
    pub fn remove(&mut self, j: usize) -> bool {
        let was = std::mem::replace(&mut self.member[j - 1], false);
        if was {
            self.len -= 1;
        }
        was
    }

    pub fn members(&self) -> Vec<usize> {
        (1..=self.member.len())
            .filter(|&j| self.member[j - 1])
            .collect()
    }
}

/// One row of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub algo: Algo,
    pub col_adds: u64,
    pub xor_ops: u64,
    pub col_adds_cum: u64,
    pub xor_ops_cum: u64,
    /// `None` when no reference was supplied.
    pub rel_l1_err: Option<f64>,
    pub unreduced_frac: f64,
    pub essential_precision: Option<f64>,
    pub essential_recall: Option<f64>,
    pub pivots: usize,
    pub cleared: usize,
}

pub const TRACE_CSV_HEADER: &str = "iter,algo,col_adds,xor_ops,col_adds_cum,xor_ops_cum,rel_l1_err,unreduced_frac,essential_precision,pivots,cleared";

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

impl IterationRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.iter,
            self.algo,
            self.col_adds,
            self.xor_ops,
            self.col_adds_cum,
            self.xor_ops_cum,
            fmt_opt(self.rel_l1_err),
            self.unreduced_frac,
            fmt_opt(self.essential_precision),
            self.pivots,
            self.cleared
        )
    }
}

/// The ordered records of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn total_col_adds(&self) -> u64 {
        self.records.iter().map(|r| r.col_adds).sum()
    }

    pub fn total_xor_ops(&self) -> u64 {
        self.records.iter().map(|r| r.xor_ops).sum()
    }

    /// First iteration index whose record satisfies `pred`.
    pub fn first_iter(&self, pred: impl Fn(&IterationRecord) -> bool) -> Option<usize> {
        self.records.iter().find(|r| pred(r)).map(|r| r.iter)
    }

    pub fn iters_to_rel_error(&self, threshold: f64) -> Option<usize> {
        self.first_iter(|r| r.rel_l1_err.is_some_and(|e| e <= threshold))
    }

    pub fn iters_to_unreduced(&self, threshold: f64) -> Option<usize> {
        self.first_iter(|r| r.unreduced_frac <= threshold)
    }

    pub fn iters_to_precision(&self, threshold: f64) -> Option<usize> {
        self.first_iter(|r| r.essential_precision.is_some_and(|p| p >= threshold))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TRACE_CSV_HEADER}")?;
        for rec in &self.records {
            writeln!(out, "{}", rec.csv_row())?;
        }
        Ok(())
    }
}

/// Collects the trace of one reduction, scoring records against an optional
/// reference.
#[derive(Debug, Clone)]
pub struct TraceSink {
    algo: Algo,
    reference: Option<Arc<Reference>>,
    enabled: bool,
    trace: IterationTrace,
}

impl TraceSink {
    pub fn new(algo: Algo, reference: Option<Arc<Reference>>) -> Self {
        Self {
            algo,
            reference,
            enabled: true,
            trace: IterationTrace::default(),
        }
    }

    /// A sink that keeps nothing; reducers skip per-iteration scoring.
    pub fn disabled(algo: Algo) -> Self {
        Self {
            enabled: false,
            ..Self::new(algo, None)
        }
    }

    pub fn algo(&self) -> Algo {
        self.algo
    }

    pub fn reference(&self) -> Option<&Arc<Reference>> {
        self.reference.as_ref()
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn push(&mut self, record: IterationRecord) {
        if self.enabled {
            self.trace.records.push(record);
        }
    }

    pub fn trace(&self) -> &IterationTrace {
        &self.trace
    }

    pub fn into_trace(self) -> IterationTrace {
        self.trace
    }
}

/// Incremental bookkeeping for a running reduction: the cached low vector and
/// its row histogram, certified columns, the paired set, the essential
/// estimate and the operation counters.
#[derive(Debug, Clone)]
pub(crate) struct Progress {
    low: Vec<usize>,
    low_count: Vec<u32>,
    touched_rows: Vec<usize>,
    resolved: Vec<bool>,
    n_resolved: usize,
    paired: Vec<bool>,
    fresh_pairs: Vec<usize>,
    estimate: EssentialEstimate,
    missed_essential: usize,
    pub pivots: usize,
    pub cleared: usize,
    pub counters: TraceCounters,
    pub column_adds: Vec<u32>,
    reference: Option<Arc<Reference>>,
    l1_diff: u64,
}

impl Progress {
    /// Columns that start empty are certified from the outset.
    pub fn new(initial: &LowVector, reference: Option<Arc<Reference>>) -> Self {
        let m = initial.len();
        if let Some(r) = &reference {
            assert_eq!(r.lowstar.len(), m, "reference size mismatch");
        }
        let mut low_count = vec![0u32; m];
        let mut touched_rows = Vec::new();
        for &row in initial.as_slice() {
            if row > 0 {
                low_count[row - 1] += 1;
                touched_rows.push(row);
            }
        }
        let resolved: Vec<bool> = initial.as_slice().iter().map(|&v| v == 0).collect();
        let n_resolved = resolved.iter().filter(|&&r| r).count();
        let l1_diff = reference.as_ref().map_or(0, |r| {
            initial
                .as_slice()
                .iter()
                .zip(r.lowstar.as_slice())
                .map(|(&a, &b)| a.abs_diff(b) as u64)
                .sum()
        });
        Self {
            low: initial.as_slice().to_vec(),
            low_count,
            touched_rows,
            resolved,
            n_resolved,
            paired: vec![false; m],
            fresh_pairs: Vec::new(),
            estimate: EssentialEstimate::full(m),
            missed_essential: 0,
            pivots: 0,
            cleared: 0,
            counters: TraceCounters::default(),
            column_adds: vec![0; m],
            reference,
            l1_diff,
        }
    }

    pub fn size(&self) -> usize {
        self.low.len()
    }

    pub fn low(&self, j: usize) -> usize {
        self.low[j - 1]
    }

    pub fn low_vector(&self) -> LowVector {
        LowVector::new(self.low.clone())
    }

    /// Number of columns whose current low is `row`.
    pub fn low_count(&self, row: usize) -> u32 {
        self.low_count[row - 1]
    }

    pub fn set_low(&mut self, j: usize, new: usize) {
        let old = std::mem::replace(&mut self.low[j - 1], new);
        if old == new {
            return;
        }
        if old > 0 {
            self.low_count[old - 1] -= 1;
        }
        if new > 0 {
            self.low_count[new - 1] += 1;
            self.touched_rows.push(new);
        }
        if let Some(r) = &self.reference {
            let star = r.lowstar.get(j);
            self.l1_diff = self.l1_diff - old.abs_diff(star) as u64 + new.abs_diff(star) as u64;
        }
    }

    pub fn is_resolved(&self, j: usize) -> bool {
        self.resolved[j - 1]
    }

    pub fn resolve(&mut self, j: usize) {
        if !std::mem::replace(&mut self.resolved[j - 1], true) {
            self.n_resolved += 1;
        }
    }

    pub fn all_resolved(&self) -> bool {
        self.n_resolved == self.resolved.len()
    }

    pub fn resolved_mask(&self) -> &[bool] {
        &self.resolved
    }

    pub fn is_paired(&self, j: usize) -> bool {
        self.paired[j - 1]
    }

    pub fn mark_paired(&mut self, j: usize) {
        if !std::mem::replace(&mut self.paired[j - 1], true) {
            self.fresh_pairs.push(j);
        }
    }

    pub fn estimate(&self) -> &EssentialEstimate {
        &self.estimate
    }

    fn drop_from_estimate(&mut self, j: usize) {
        if self.estimate.remove(j) && self.reference.as_ref().is_some_and(|r| r.is_essential(j)) {
            self.missed_essential += 1;
        }
    }

    /// `E <- (E \ paired) \ {low(j)}`, applied incrementally: `paired` only
    /// grows, and any row that is a current low was touched since the last update.
    pub fn update_estimate(&mut self) {
        for j in std::mem::take(&mut self.fresh_pairs) {
            self.drop_from_estimate(j);
        }
        for row in std::mem::take(&mut self.touched_rows) {
            if self.low_count[row - 1] > 0 {
                self.drop_from_estimate(row);
            }
        }
    }

    /// Scores the current state and resets the per-iteration counters.
    pub fn snapshot(&mut self, iter: usize, algo: Algo) -> IterationRecord {
        let m = self.size();
        let (rel, precision, recall) = match &self.reference {
            Some(r) => {
                let n_ess = r.n_essential;
                let precision = if self.estimate.is_empty() {
                    1.0
                } else {
                    (n_ess - self.missed_essential) as f64 / self.estimate.len() as f64
                };
                let recall = if n_ess == 0 {
                    1.0
                } else {
                    (n_ess - self.missed_essential) as f64 / n_ess as f64
                };
                (Some(ratio(self.l1_diff, r.norm)), Some(precision), Some(recall))
            }
            None => (None, None, None),
        };
        let unreduced = if m == 0 {
            0.0
        } else {
            (m - self.n_resolved) as f64 / m as f64
        };
        let record = IterationRecord {
            iter,
            algo,
            col_adds: self.counters.col_adds,
            xor_ops: self.counters.xor_ops,
            col_adds_cum: self.counters.col_adds_cum,
            xor_ops_cum: self.counters.xor_ops_cum,
            rel_l1_err: rel,
            unreduced_frac: unreduced,
            essential_precision: precision,
            essential_recall: recall,
            pivots: self.pivots,
            cleared: self.cleared,
        };
        self.counters.start_iteration();
        record
    }
}
