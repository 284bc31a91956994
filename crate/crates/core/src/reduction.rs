use crate::boundary::LowVector;

/// The result of running a reducer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Final low vector; equals `lowstar` when `converged`.
    pub low: LowVector,
    /// False when the parallel reducer hit its iteration cap first.
    pub converged: bool,
    pub iterations: usize,
    pub total_col_adds: u64,
    pub total_xor_ops: u64,
    /// Additions received by each column (index `j - 1`).
    pub column_adds: Vec<u32>,
    /// Columns zeroed by clearing rather than by additions, in clearing order.
    pub cleared: Vec<usize>,
    /// Compression pins `(column, certified lowstar)`; parallel reducer only.
    pub pins: Vec<(usize, usize)>,
}
