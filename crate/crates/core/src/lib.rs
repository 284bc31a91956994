//! Persistent-homology barcodes by boundary matrix reduction over GF(2).
//!
//! The crate builds Vietoris-Rips filtrations from point clouds, turns them
//! into sparse boundary matrices and reduces them with one of three
//! algorithms:
//!
//! * [`reduce_standard`], the left-to-right column sweep,
//! * [`reduce_twist`], the same sweep by descending dimension with clearing,
//! * [`reduce_pms`], a parallel multi-scale reduction that certifies final
//!   lows early through lower bounds and reduces disjoint groups of columns
//!   concurrently.
//!
//! Every reducer can record a per-iteration [`IterationTrace`] with operation
//! counts and, given the final lows as a [`Reference`], error and precision
//! curves.
//!
//! ```
//! use lowstar_core::{build_vietoris_rips, extract_pairs, reduce_pms, sample};
//! use lowstar_core::{Algo, Ensemble, PmsOptions, TraceSink};
//!
//! let cloud = sample(Ensemble::Trefoil, 12, 7, 0.05).unwrap();
//! let filtration = build_vietoris_rips(&cloud, 1.5, 6, 2).unwrap();
//! let mut matrix = filtration.boundary_matrix();
//! let mut sink = TraceSink::disabled(Algo::Pms);
//! let red = reduce_pms(&mut matrix, &PmsOptions::default(), &mut sink).unwrap();
//! assert!(red.converged);
//! let barcode = extract_pairs(&filtration, &red.low).unwrap();
//! assert!(barcode.essential().count() >= 1);
//! ```

pub mod baseline;
pub mod boundary;
pub mod complex;
pub mod ensembles;
pub mod error;
pub mod metrics;
pub mod pms;
mod reduction;

pub use baseline::{reduce_standard, reduce_twist};
pub use boundary::{compute_beta, compute_leftcol, is_reduced, BetaVector, BoundaryMatrix, Column, LowVector};
pub use complex::{
    build_vietoris_rips, extract_pairs, extract_pairs_by_index, Barcode, Filtration, Interval, PointCloud, Simplex,
};
pub use ensembles::{sample, Ensemble};
pub use error::{Error, Result};
pub use metrics::{
    essential_precision, rel_l1_error, unreduced_proportion, Algo, IterationRecord, IterationTrace, Reference,
    TraceCounters, TraceSink,
};
pub use pms::{reduce_pms, Execution, PmsOptions, PmsReducer, ReductionState, SchedulePolicy};
pub use reduction::Reduction;

/// Reduces with the chosen algorithm. `opts` only matters for [`Algo::Pms`].
pub fn reduce(
    algo: Algo,
    matrix: &mut BoundaryMatrix,
    opts: &PmsOptions,
    sink: &mut TraceSink,
) -> Result<Reduction> {
    match algo {
        Algo::Standard => Ok(reduce_standard(matrix, sink)),
        Algo::Twist => Ok(reduce_twist(matrix, sink)),
        Algo::Pms => reduce_pms(matrix, opts, sink),
    }
}
