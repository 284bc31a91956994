use std::sync::Arc;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::boundary::{add_column_into, compute_beta, BetaVector, BoundaryMatrix, Column, LowVector};
use crate::metrics::{EssentialEstimate, Progress, Reference, TraceCounters};

use super::schedule::{self, Neighbourhood};
use super::PmsOptions;

/// What one compression-clearing pass decided.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompressionOutcome {
    /// Columns proven positive and zeroed.
    pub zeroed: Vec<usize>,
    /// Columns whose current low was proven final.
    pub pivots: Vec<usize>,
    /// `(column, row)` pairs where the final low is known but not yet reached.
    pub pins: Vec<(usize, usize)>,
}

impl CompressionOutcome {
    pub fn is_empty(&self) -> bool {
        self.zeroed.is_empty() && self.pivots.is_empty() && self.pins.is_empty()
    }
}

/// What one Phase II pass did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Phase2Outcome {
    pub additions: u64,
    /// Neighbourhoods that were available, and those processed.
    pub available: usize,
    pub scheduled: Vec<Neighbourhood>,
    /// Columns certified at the barrier.
    pub new_pivots: Vec<usize>,
    /// Columns reduced to zero.
    pub zeroed: Vec<usize>,
}

/// Mutable state of a parallel multi-scale reduction.
///
/// Besides the matrix this holds `beta`, the certified pivots with a
/// row -> pivot lookup, compression pins and the shared [`Progress`]
/// bookkeeping (cached lows, row histogram of lows, paired set, essential
/// estimate and counters).
#[derive(Debug, Clone)]
pub struct ReductionState {
    matrix: BoundaryMatrix,
    beta: BetaVector,
    blocks: Vec<Vec<usize>>,
    pivot: Vec<bool>,
    pivot_of_row: Vec<usize>,
    pin: Vec<usize>,
    pins: Vec<(usize, usize)>,
    cleared: Vec<usize>,
    pub(crate) progress: Progress,
    seen: Vec<u32>,
    epoch: u32,
}

impl ReductionState {
    pub fn new(matrix: BoundaryMatrix, reference: Option<Arc<Reference>>) -> Self {
        let m = matrix.size();
        let beta = compute_beta(&matrix);
        let progress = Progress::new(&matrix.lows(), reference);
        let blocks = matrix.columns_by_dim();
        Self {
            matrix,
            beta,
            blocks,
            pivot: vec![false; m],
            pivot_of_row: vec![0; m + 1],
            pin: vec![0; m],
            pins: Vec::new(),
            cleared: Vec::new(),
            progress,
            seen: vec![0; m + 1],
            epoch: 0,
        }
    }

    pub fn matrix(&self) -> &BoundaryMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> BoundaryMatrix {
        self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn beta(&self) -> &BetaVector {
        &self.beta
    }

    pub fn low(&self, j: usize) -> usize {
        self.progress.low(j)
    }

    pub fn low_vector(&self) -> LowVector {
        self.progress.low_vector()
    }

    pub fn is_pivot(&self, j: usize) -> bool {
        self.pivot[j - 1]
    }

    pub fn pivots(&self) -> Vec<usize> {
        (1..=self.size()).filter(|&j| self.pivot[j - 1]).collect()
    }

    pub fn pivot_count(&self) -> usize {
        self.progress.pivots
    }

    pub fn is_paired(&self, j: usize) -> bool {
        self.progress.is_paired(j)
    }

    pub fn is_resolved(&self, j: usize) -> bool {
        self.progress.is_resolved(j)
    }

    pub fn all_resolved(&self) -> bool {
        self.progress.all_resolved()
    }

    pub fn resolved_mask(&self) -> &[bool] {
        self.progress.resolved_mask()
    }

    pub fn pin(&self, j: usize) -> Option<usize> {
        Some(self.pin[j - 1]).filter(|&i| i > 0)
    }

    pub fn pins(&self) -> &[(usize, usize)] {
        &self.pins
    }

    pub fn cleared(&self) -> &[usize] {
        &self.cleared
    }

    pub fn essential_estimate(&self) -> &EssentialEstimate {
        self.progress.estimate()
    }

    pub fn counters(&self) -> &TraceCounters {
        &self.progress.counters
    }

    pub fn column_adds(&self) -> &[u32] {
        &self.progress.column_adds
    }

    /// Number of columns currently having `row` as their low.
    pub fn low_multiplicity(&self, row: usize) -> u32 {
        self.progress.low_count(row)
    }

    fn certify_pivot(&mut self, j: usize) {
        let low = self.low(j);
        debug_assert!(low > 0 && !self.pivot[j - 1]);
        debug_assert_eq!(self.pivot_of_row[low], 0, "two pivots share row {low}");
        self.pivot[j - 1] = true;
        self.pivot_of_row[low] = j;
        self.progress.pivots += 1;
        self.progress.mark_paired(j);
        self.progress.mark_paired(low);
        self.progress.resolve(j);
    }

    /// Zeroes column `j`, whose final low is known to be 0.
    fn clear(&mut self, j: usize) {
        debug_assert!(!self.pivot[j - 1]);
        if self.matrix.clear_column(j) {
            self.cleared.push(j);
            self.progress.cleared += 1;
        }
        self.progress.set_low(j, 0);
        self.progress.resolve(j);
    }

    /// Certifies every column whose low already equals its beta and clears the
    /// columns they pair with. Columns with a positive beta are known negative
    /// and enter the paired set.
    pub fn phase0_init(&mut self) -> Vec<usize> {
        let m = self.size();
        for j in 1..=m {
            if self.beta.get(j) > 0 {
                self.progress.mark_paired(j);
            }
        }
        let seeds: Vec<usize> = (1..=m)
            .filter(|&j| {
                let low = self.low(j);
                low > 0 && self.beta.get(j) == low
            })
            .collect();
        for &j in &seeds {
            self.certify_pivot(j);
        }
        for &j in &seeds {
            self.clear(self.low(j));
        }
        seeds
    }

    /// Walks the nonzero columns of dimension `d` in order and certifies those
    /// whose low cannot collide with any earlier column's.
    ///
    /// `lowerbound` is the largest low seen twice among non-pivot columns; a
    /// column at or below it may still be hit by a reduction of that pair.
    pub fn find_local_injections(&mut self, d: usize) -> Vec<usize> {
        let Some(block) = self.blocks.get(d) else {
            return Vec::new();
        };
        self.epoch += 1;
        let epoch = self.epoch;
        let mut lowerbound = 0;
        let mut found = Vec::new();
        for &j in block {
            let low = self.progress.low(j);
            if low == 0 {
                continue;
            }
            let seen_before = self.seen[low] == epoch;
            self.seen[low] = epoch;
            if self.pivot[j - 1] || low <= lowerbound {
                continue;
            }
            if seen_before {
                lowerbound = low;
            } else {
                found.push(j);
            }
        }
        for &j in &found {
            self.certify_pivot(j);
        }
        found
    }

    /// Local injections over every dimension, then clearing of the new pivots'
    /// partner columns.
    pub fn phase1(&mut self) -> Vec<usize> {
        let mut found = Vec::new();
        for d in 1..self.blocks.len() {
            found.extend(self.find_local_injections(d));
        }
        for &j in &found {
            self.clear(self.low(j));
        }
        found
    }

    /// Narrows each open column's final low to the rows of the right dimension
    /// between `beta` and the current low that are not already paired.
    ///
    /// A lone candidate 0 zeroes the column; a lone row either certifies the
    /// column (if already reached) or is stored as a pin.
    pub fn clear_by_compression(&mut self) -> CompressionOutcome {
        let mut outcome = CompressionOutcome::default();
        for j in 1..=self.size() {
            let low = self.low(j);
            if low == 0 || self.pivot[j - 1] || self.pin[j - 1] > 0 || self.progress.is_resolved(j) {
                continue;
            }
            let beta = self.beta.get(j);
            let rows = &self.blocks[self.matrix.dim(j) - 1];
            let upper = rows.partition_point(|&r| r <= low);
            let floor = beta.max(1);
            let mut candidates = [0usize; 2];
            let mut n = usize::from(beta == 0);
            for &row in rows[..upper].iter().rev() {
                if row < floor {
                    break;
                }
                if self.progress.is_paired(row) {
                    continue;
                }
                if n < 2 {
                    candidates[n] = row;
                }
                n += 1;
                if n >= 2 {
                    break;
                }
            }
            debug_assert!(n > 0, "no candidate final low for column {j}");
            if n != 1 {
                continue;
            }
            if beta == 0 {
                self.clear(j);
                outcome.zeroed.push(j);
                continue;
            }
            let row = candidates[0];
            if row == low {
                self.certify_pivot(j);
                self.clear(row);
                outcome.pivots.push(j);
            } else {
                self.pin[j - 1] = row;
                self.pins.push((j, row));
                self.progress.mark_paired(j);
                self.progress.mark_paired(row);
                outcome.pins.push((j, row));
            }
        }
        outcome
    }

    /// Non-pivot columns grouped by the pivot that shares their low.
    pub fn neighbourhoods(&self) -> Vec<Neighbourhood> {
        let m = self.size();
        let mut slot = vec![usize::MAX; m + 1];
        let mut groups: Vec<Neighbourhood> = Vec::new();
        for j in 1..=m {
            let low = self.progress.low(j);
            if low == 0 || self.pivot[j - 1] {
                continue;
            }
            let owner = self.pivot_of_row[low];
            if owner == 0 {
                continue;
            }
            debug_assert!(owner < j);
            if slot[owner] == usize::MAX {
                slot[owner] = groups.len();
                groups.push(Neighbourhood {
                    pivot: owner,
                    members: Vec::new(),
                });
            }
            groups[slot[owner]].members.push(j);
        }
        groups.sort_by_key(|g| g.pivot);
        groups
    }

    /// Adds each scheduled pivot into every column of its neighbourhood, once.
    ///
    /// Neighbourhood columns are moved out of the matrix so each worker owns
    /// its targets outright while reading pivot columns through a shared borrow.
    /// Columns whose new low meets their beta (or pin) are certified at the
    /// barrier after all workers finish.
    pub fn phase2_parallel_reduce(
        &mut self,
        opts: &PmsOptions,
        pool: Option<&ThreadPool>,
    ) -> Phase2Outcome {
        let all = self.neighbourhoods();
        schedule::assert_disjoint(&all, self.size());
        let available = all.len();
        let chosen = schedule::select(all, opts, |j| {
            self.beta.get(j) > 0 || self.pin[j - 1] > 0
        });

        let mut work: Vec<(usize, Vec<(usize, Column)>)> = chosen
            .iter()
            .map(|g| {
                let cols = g
                    .members
                    .iter()
                    .map(|&j| (j, self.matrix.take_column(j)))
                    .collect();
                (g.pivot, cols)
            })
            .collect();

        let matrix = &self.matrix;
        let reduce_group = |(pivot, cols): &mut (usize, Vec<(usize, Column)>)| {
            let source = matrix.column(*pivot);
            let mut counters = TraceCounters::default();
            for (_, col) in cols.iter_mut() {
                counters.record_addition(add_column_into(source, col));
            }
            counters
        };
        let tallies: Vec<TraceCounters> = match pool {
            Some(pool) => pool.install(|| work.par_iter_mut().map(reduce_group).collect()),
            None => work.iter_mut().map(reduce_group).collect(),
        };

        let mut outcome = Phase2Outcome {
            available,
            scheduled: chosen,
            ..Default::default()
        };
        for tally in &tallies {
            self.progress.counters.merge(tally);
            outcome.additions += tally.col_adds;
        }
        let mut promoted = Vec::new();
        for (_, cols) in work {
            for (j, col) in cols {
                let low = col.last().copied().unwrap_or(0);
                self.matrix.put_column(j, col);
                self.progress.set_low(j, low);
                self.progress.column_adds[j - 1] += 1;
                if low == 0 {
                    self.progress.resolve(j);
                    outcome.zeroed.push(j);
                } else if low == self.beta.get(j) || low == self.pin[j - 1] {
                    promoted.push(j);
                }
            }
        }
        promoted.sort_unstable();
        for &j in &promoted {
            self.certify_pivot(j);
        }
        for &j in &promoted {
            self.clear(self.low(j));
        }
        outcome.new_pivots = promoted;
        outcome
    }

    /// Removes newly paired indices and every current low from the estimate.
    pub fn estimate_essential(&mut self) -> &EssentialEstimate {
        self.progress.update_estimate();
        self.progress.estimate()
    }
}
