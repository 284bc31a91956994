//! Sequential reference reducers: the standard left-to-right reduction and its
//! dimension-descending variant with clearing ("twist").
//!
//! Both record one trace row per visited column. A column counts as certified
//! once the sweep has visited it, once clearing has zeroed it, or if it started
//! out empty.

use crate::boundary::BoundaryMatrix;
use crate::metrics::{Progress, TraceSink};
use crate::reduction::Reduction;

struct Sweep<'a> {
    matrix: &'a mut BoundaryMatrix,
    progress: Progress,
    /// Row -> the visited column whose final low is that row.
    pivot_of_row: Vec<usize>,
    cleared: Vec<usize>,
    sink: &'a mut TraceSink,
    iter: usize,
}

impl<'a> Sweep<'a> {
    fn new(matrix: &'a mut BoundaryMatrix, sink: &'a mut TraceSink) -> Self {
        let progress = Progress::new(&matrix.lows(), sink.reference().cloned());
        let m = matrix.size();
        Self {
            matrix,
            progress,
            pivot_of_row: vec![0; m + 1],
            cleared: Vec::new(),
            sink,
            iter: 0,
        }
    }

    /// Reduces column `j` against already-reduced columns until its low is free.
    fn reduce_column(&mut self, j: usize) -> usize {
        loop {
            let low = self.matrix.low(j);
            if low == 0 {
                break 0;
            }
            let src = self.pivot_of_row[low];
            if src == 0 {
                break low;
            }
            self.matrix
                .add_columns(src, j, &mut self.progress.counters)
                .expect("pivot columns precede the column being reduced");
            self.progress.column_adds[j - 1] += 1;
            let new_low = self.matrix.low(j);
            self.progress.set_low(j, new_low);
        }
    }

    fn certify(&mut self, j: usize, low: usize) {
        if low > 0 {
            self.pivot_of_row[low] = j;
            self.progress.pivots += 1;
            self.progress.mark_paired(j);
            self.progress.mark_paired(low);
        }
        self.progress.resolve(j);
    }

    fn clear(&mut self, j: usize) {
        if self.matrix.clear_column(j) {
            self.cleared.push(j);
            self.progress.cleared += 1;
        }
        self.progress.set_low(j, 0);
        self.progress.resolve(j);
    }

    fn end_iteration(&mut self) {
        self.iter += 1;
        if self.sink.is_enabled() {
            self.progress.update_estimate();
            let rec = self.progress.snapshot(self.iter, self.sink.algo());
            self.sink.push(rec);
        } else {
            self.progress.counters.start_iteration();
        }
    }

    fn finish(self) -> Reduction {
        Reduction {
            low: self.progress.low_vector(),
            converged: true,
            iterations: self.iter,
            total_col_adds: self.progress.counters.col_adds_cum,
            total_xor_ops: self.progress.counters.xor_ops_cum,
            column_adds: self.progress.column_adds,
            cleared: self.cleared,
            pins: Vec::new(),
        }
    }
}

/// Standard reduction: for each column in order, add earlier columns sharing
/// its low until the low is unique or the column vanishes.
pub fn reduce_standard(matrix: &mut BoundaryMatrix, sink: &mut TraceSink) -> Reduction {
    let mut sweep = Sweep::new(matrix, sink);
    for j in 1..=sweep.matrix.size() {
        let low = sweep.reduce_column(j);
        sweep.certify(j, low);
        sweep.end_iteration();
    }
    sweep.finish()
}

/// Standard reduction by blocks of descending dimension, zeroing column
/// `low(j)` as soon as column `j` is reduced to a nonzero column.
pub fn reduce_twist(matrix: &mut BoundaryMatrix, sink: &mut TraceSink) -> Reduction {
    let mut sweep = Sweep::new(matrix, sink);
    let blocks = sweep.matrix.columns_by_dim();
    for block in blocks.iter().skip(1).rev() {
        for &j in block {
            let low = sweep.reduce_column(j);
            sweep.certify(j, low);
            if low > 0 {
                sweep.clear(low);
            }
            sweep.end_iteration();
        }
    }
    sweep.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::fixtures::{s8, t7};
    use crate::metrics::{Algo, Reference};
    use std::sync::Arc;

    fn run_std(m: &BoundaryMatrix) -> Reduction {
        reduce_standard(&mut m.clone(), &mut TraceSink::disabled(Algo::Standard))
    }

    fn run_twist(m: &BoundaryMatrix) -> Reduction {
        reduce_twist(&mut m.clone(), &mut TraceSink::disabled(Algo::Twist))
    }

    #[test]
    fn standard_on_filled_triangle() {
        let r = run_std(&t7());
        assert_eq!(r.low.as_slice(), &[0, 0, 0, 2, 3, 0, 6]);
        assert_eq!(r.total_col_adds, 2);
        assert_eq!(r.column_adds, vec![0, 0, 0, 0, 0, 2, 0]);
        assert_eq!(r.iterations, 7);
    }

    #[test]
    fn standard_on_square() {
        let r = run_std(&s8());
        assert_eq!(r.low.as_slice(), &[0, 0, 0, 0, 2, 3, 4, 0]);
        assert_eq!(r.column_adds[7], 3);
        assert_eq!(r.total_col_adds, 3);
    }

    #[test]
    fn standard_on_zero_matrix() {
        let r = run_std(&BoundaryMatrix::zero(4));
        assert_eq!(r.low.as_slice(), &[0; 4]);
        assert_eq!(r.total_col_adds, 0);
    }

    #[test]
    fn twist_clears_instead_of_adding() {
        let mut m = t7();
        let r = reduce_twist(&mut m, &mut TraceSink::disabled(Algo::Twist));
        assert_eq!(r.low.as_slice(), &[0, 0, 0, 2, 3, 0, 6]);
        assert_eq!(r.total_col_adds, 0);
        assert_eq!(r.cleared, vec![6]);
        assert!(m.column(6).is_empty());
        // dim-2 block then the three edges
        assert_eq!(r.iterations, 4);
    }

    #[test]
    fn twist_on_square_and_zero() {
        let r = run_twist(&s8());
        assert_eq!(r.low.as_slice(), &[0, 0, 0, 0, 2, 3, 4, 0]);
        assert_eq!(r.total_col_adds, 3);
        assert_eq!(run_twist(&BoundaryMatrix::zero(3)).low.as_slice(), &[0; 3]);
    }

    #[test]
    fn standard_trace_scores_against_reference() {
        let reference = Arc::new(Reference::from_lowstar(run_std(&s8()).low));
        let mut sink = TraceSink::new(Algo::Standard, Some(reference));
        reduce_standard(&mut s8(), &mut sink);
        let trace = sink.into_trace();
        assert_eq!(trace.len(), 8);
        let last = trace.last().unwrap();
        assert_eq!(last.rel_l1_err, Some(0.0));
        assert_eq!(last.unreduced_frac, 0.0);
        assert_eq!(last.essential_precision, Some(1.0));
        assert_eq!(last.col_adds_cum, 3);
        assert_eq!(trace.records[7].col_adds, 3);
        // vertices start certified, edges certify one per iteration
        assert_eq!(trace.records[4].unreduced_frac, 3.0 / 8.0);
        for rec in &trace.records {
            assert_eq!(rec.essential_recall, Some(1.0));
        }
    }
}
