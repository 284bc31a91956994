//! Parallel multi-scale reduction.
//!
//! Phase 0 certifies every column whose low already equals its beta lower
//! bound and clears the partner columns. Each following iteration then
//!
//! 1. certifies local injections in every dimension (Phase I),
//! 2. optionally narrows open columns by compression,
//! 3. adds every pivot into the columns sharing its low, one addition per
//!    column, with neighbourhoods processed in parallel (Phase II),
//! 4. refreshes the essential-set estimate and records a trace row.
//!
//! Every non-terminal iteration either certifies a pivot or strictly lowers
//! some low, so the loop ends once all columns are certified. An iteration cap
//! turns the reducer into an early-stopping estimator.

mod schedule;
mod state;

use std::str::FromStr;

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::boundary::BoundaryMatrix;
use crate::error::{Error, Result};
use crate::metrics::TraceSink;
use crate::reduction::Reduction;

pub use schedule::Neighbourhood;
pub use state::{CompressionOutcome, Phase2Outcome, ReductionState};

/// Order in which neighbourhoods are served when fewer processors than
/// neighbourhoods are available.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum SchedulePolicy {
    /// Ascending pivot index.
    #[default]
    All,
    /// Largest neighbourhood first.
    LargestNeighbourhoodFirst,
    /// Neighbourhoods holding the most columns already known to be negative.
    NegativeFirst,
}

impl SchedulePolicy {
    pub const ALL: [SchedulePolicy; 3] = [
        SchedulePolicy::All,
        SchedulePolicy::LargestNeighbourhoodFirst,
        SchedulePolicy::NegativeFirst,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchedulePolicy::All => "all",
            SchedulePolicy::LargestNeighbourhoodFirst => "big-nbhd",
            SchedulePolicy::NegativeFirst => "neg-first",
        }
    }
}

impl FromStr for SchedulePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchedulePolicy::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown policy `{s}`")))
    }
}

/// How Phase II work is executed. Both modes produce identical results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    /// One thread walks the scheduled neighbourhoods in order.
    #[default]
    Simulated,
    /// A dedicated rayon pool with this many workers.
    Parallel { workers: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmsOptions {
    pub max_iter: usize,
    pub enable_compression_clearing: bool,
    /// Neighbourhoods processed per iteration; `None` for unbounded.
    pub processor_cap: Option<usize>,
    pub schedule_policy: SchedulePolicy,
    pub execution: Execution,
}

impl Default for PmsOptions {
    fn default() -> Self {
        Self {
            max_iter: usize::MAX,
            enable_compression_clearing: false,
            processor_cap: None,
            schedule_policy: SchedulePolicy::All,
            execution: Execution::Simulated,
        }
    }
}

impl PmsOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.processor_cap == Some(0) {
            return Err(Error::InvalidParameter("processor cap must be at least 1".into()));
        }
        if let Execution::Parallel { workers: 0 } = self.execution {
            return Err(Error::InvalidParameter("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a single iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub iter: usize,
    pub phase1_pivots: Vec<usize>,
    pub compression: CompressionOutcome,
    pub phase2: Phase2Outcome,
    pub status: Status,
}

impl StepReport {
    /// Whether the iteration changed anything.
    pub fn made_progress(&self) -> bool {
        !self.phase1_pivots.is_empty()
            || !self.compression.is_empty()
            || self.phase2.additions > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    /// Every column certified.
    Converged,
    /// Iteration cap reached first.
    Partial,
}

/// Step-by-step driver, for callers that inspect the state between iterations.
pub struct PmsReducer {
    state: ReductionState,
    opts: PmsOptions,
    pool: Option<ThreadPool>,
    sink: TraceSink,
    iter: usize,
    status: Status,
}

impl PmsReducer {
    /// Runs Phase 0 and records it as iteration 0.
    pub fn new(matrix: BoundaryMatrix, opts: PmsOptions, sink: TraceSink) -> Result<Self> {
        opts.validate()?;
        let pool = make_pool(&opts)?;
        Ok(Self::start(matrix, opts, pool, sink))
    }

    fn start(matrix: BoundaryMatrix, opts: PmsOptions, pool: Option<ThreadPool>, sink: TraceSink) -> Self {
        let state = ReductionState::new(matrix, sink.reference().cloned());
        let mut reducer = Self {
            state,
            opts,
            pool,
            sink,
            iter: 0,
            status: Status::Running,
        };
        reducer.state.phase0_init();
        reducer.finish_iteration();
        if reducer.state.all_resolved() {
            reducer.status = Status::Converged;
        }
        reducer
    }

    pub fn state(&self) -> &ReductionState {
        &self.state
    }

    pub fn iteration(&self) -> usize {
        self.iter
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn sink(&self) -> &TraceSink {
        &self.sink
    }

    fn finish_iteration(&mut self) {
        self.state.estimate_essential();
        if self.sink.is_enabled() {
            let rec = self.state.progress.snapshot(self.iter, self.sink.algo());
            self.sink.push(rec);
        } else {
            self.state.progress.counters.start_iteration();
        }
    }

    /// Runs one iteration. Returns `None` once the reducer has stopped.
    pub fn step(&mut self) -> Option<StepReport> {
        if self.status != Status::Running {
            return None;
        }
        self.iter += 1;
        let phase1_pivots = self.state.phase1();
        let compression = if self.opts.enable_compression_clearing {
            self.state.clear_by_compression()
        } else {
            CompressionOutcome::default()
        };
        let phase2 = self
            .state
            .phase2_parallel_reduce(&self.opts, self.pool.as_ref());
        self.finish_iteration();

        let mut report = StepReport {
            iter: self.iter,
            phase1_pivots,
            compression,
            phase2,
            status: Status::Running,
        };
        if self.state.all_resolved() {
            self.status = Status::Converged;
        } else if !report.made_progress() {
            // Cannot happen: an unreduced matrix always yields a new pivot or
            // a nonempty neighbourhood.
            debug_assert!(false, "stalled at iteration {} without converging", self.iter);
            self.status = if self.state.low_vector().is_reduced() {
                Status::Converged
            } else {
                Status::Partial
            };
        } else if self.iter >= self.opts.max_iter {
            self.status = Status::Partial;
        }
        report.status = self.status;
        Some(report)
    }

    /// Iterates until convergence or the cap.
    pub fn run(mut self) -> (Reduction, BoundaryMatrix, TraceSink) {
        while self.step().is_some() {}
        self.finish()
    }

    pub fn finish(self) -> (Reduction, BoundaryMatrix, TraceSink) {
        let progress = &self.state.progress;
        let reduction = Reduction {
            low: progress.low_vector(),
            converged: self.status == Status::Converged,
            iterations: self.iter,
            total_col_adds: progress.counters.col_adds_cum,
            total_xor_ops: progress.counters.xor_ops_cum,
            column_adds: progress.column_adds.clone(),
            cleared: self.state.cleared().to_vec(),
            pins: self.state.pins().to_vec(),
        };
        (reduction, self.state.into_matrix(), self.sink)
    }
}

fn make_pool(opts: &PmsOptions) -> Result<Option<ThreadPool>> {
    match opts.execution {
        Execution::Simulated => Ok(None),
        Execution::Parallel { workers } => ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map(Some)
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}"))),
    }
}

/// Reduces `matrix` in place with the parallel multi-scale algorithm.
///
/// The returned reduction has `converged == false` if `opts.max_iter` was
/// reached first; its low vector is then an upper bound on `lowstar`.
pub fn reduce_pms(
    matrix: &mut BoundaryMatrix,
    opts: &PmsOptions,
    sink: &mut TraceSink,
) -> Result<Reduction> {
    opts.validate()?;
    let pool = make_pool(opts)?;
    let input = std::mem::replace(matrix, BoundaryMatrix::zero(0));
    let owned_sink = std::mem::replace(sink, TraceSink::disabled(sink.algo()));
    let reducer = PmsReducer::start(input, *opts, pool, owned_sink);
    let (reduction, reduced, filled) = reducer.run();
    *matrix = reduced;
    *sink = filled;
    Ok(reduction)
}
