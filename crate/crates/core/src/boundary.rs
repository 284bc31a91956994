//! Sparse column-major boundary matrices over GF(2).
//!
//! Rows and columns are 1-based; `0` is the "empty column" sentinel returned
//! by [`BoundaryMatrix::low`]. Each column is stored as a strictly ascending
//! list of row indices, so the lowest nonzero sits at the tail and a column
//! addition is a linear merge.

use std::io::{BufRead, Write};
use std::ops::Index;

use crate::error::{Error, Result};
use crate::metrics::TraceCounters;

/// A sorted list of row indices holding a one.
pub type Column = Vec<usize>;

/// Symmetric difference of two sorted columns, written into `out`.
///
/// Returns the number of positions where at least one operand is nonzero,
/// i.e. the count of nontrivial XORs (`1+1`, `1+0`, `0+1`) the merge performed.
pub fn xor_into(a: &[usize], b: &[usize], out: &mut Column) -> u64 {
    out.clear();
    out.reserve(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    let mut touched = 0u64;
    while i < a.len() && k < b.len() {
        touched += 1;
        match a[i].cmp(&b[k]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[k]);
                k += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                k += 1;
            }
        }
    }
    touched += (a.len() - i + b.len() - k) as u64;
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[k..]);
    touched
}

/// Adds `src` into `dst` in place, returning the XOR count.
pub fn add_column_into(src: &[usize], dst: &mut Column) -> u64 {
    let mut out = Column::new();
    let touched = xor_into(dst, src, &mut out);
    *dst = out;
    touched
}

/// An `m x m` strictly upper-triangular GF(2) matrix stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    columns: Vec<Column>,
    dims: Vec<usize>,
    nnz: usize,
}

impl BoundaryMatrix {
    /// Builds a matrix from 1-based row lists and per-column simplex dimensions.
    ///
    /// Columns must be strictly ascending and strictly above the diagonal, and
    /// a column of dimension `d` may only reference rows of dimension `d - 1`.
    pub fn new(columns: Vec<Column>, dims: Vec<usize>) -> Result<Self> {
        if columns.len() != dims.len() {
            return Err(Error::LengthMismatch {
                left: columns.len(),
                right: dims.len(),
            });
        }
        let mut nnz = 0;
        for (idx, col) in columns.iter().enumerate() {
            let j = idx + 1;
            if col.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::UnsortedColumn { column: j });
            }
            for &row in col {
                if row == 0 || row >= j {
                    return Err(Error::NotUpperTriangular { column: j, row });
                }
                let row_dim = dims[row - 1];
                if dims[idx] == 0 || row_dim + 1 != dims[idx] {
                    return Err(Error::GradingMismatch {
                        column: j,
                        dim: dims[idx],
                        row,
                        row_dim,
                    });
                }
            }
            nnz += col.len();
        }
        Ok(Self {
            columns,
            dims,
            nnz,
        })
    }

    /// The all-zero matrix of size `m` (every column treated as a vertex).
    pub fn zero(m: usize) -> Self {
        Self {
            columns: vec![Column::new(); m],
            dims: vec![0; m],
            nnz: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j - 1]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j - 1]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    /// Largest row index holding a one in column `j`, or 0 if the column is empty.
    pub fn low(&self, j: usize) -> usize {
        self.columns[j - 1].last().copied().unwrap_or(0)
    }

    pub fn lows(&self) -> LowVector {
        LowVector((1..=self.size()).map(|j| self.low(j)).collect())
    }

    /// Column indices grouped by dimension, each group ascending.
    pub fn columns_by_dim(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.max_dim() + 1];
        for (idx, &d) in self.dims.iter().enumerate() {
            groups[d].push(idx + 1);
        }
        groups
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.size() {
            return Err(Error::ColumnOutOfRange {
                index: j,
                m: self.size(),
            });
        }
        Ok(())
    }

    /// `column[dst] += column[src]` over GF(2).
    ///
    /// Only left-to-right additions (`src < dst`) are legal. The counters get one
    /// column addition plus the merge's XOR count.
    pub fn add_columns(
        &mut self,
        src: usize,
        dst: usize,
        counters: &mut TraceCounters,
    ) -> Result<&[usize]> {
        self.check_index(src)?;
        self.check_index(dst)?;
        if src >= dst {
            return Err(Error::IllegalAddition { src, dst });
        }
        let (left, right) = self.columns.split_at_mut(dst - 1);
        let target = &mut right[0];
        let before = target.len();
        let xors = add_column_into(&left[src - 1], target);
        self.nnz = self.nnz - before + target.len();
        counters.record_addition(xors);
        Ok(&self.columns[dst - 1])
    }

    /// Empties column `j`, returning whether it held any nonzero.
    pub fn clear_column(&mut self, j: usize) -> bool {
        let col = std::mem::take(&mut self.columns[j - 1]);
        self.nnz -= col.len();
        !col.is_empty()
    }

    /// Moves column `j` out, leaving it empty. Pair with [`Self::put_column`].
    pub(crate) fn take_column(&mut self, j: usize) -> Column {
        let col = std::mem::take(&mut self.columns[j - 1]);
        self.nnz -= col.len();
        col
    }

    pub(crate) fn put_column(&mut self, j: usize, col: Column) {
        debug_assert!(col.last().is_none_or(|&r| r < j));
        self.nnz += col.len();
        let old = std::mem::replace(&mut self.columns[j - 1], col);
        self.nnz -= old.len();
    }

    /// Writes the text format: a line with `m`, then `j d i1 .. ik` for each
    /// nonempty column.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.size())?;
        for (idx, col) in self.columns.iter().enumerate() {
            if col.is_empty() {
                continue;
            }
            write!(out, "{} {}", idx + 1, self.dims[idx])?;
            for row in col {
                write!(out, " {row}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Parses the text format written by [`Self::write_text`].
    ///
    /// Omitted columns are empty and taken to be vertices (dimension 0).
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate().filter_map(|(n, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Ok((n + 1, l))),
            Err(e) => Some(Err(e)),
        });
        let (first_no, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing matrix size".into(),
        })??;
        let m: usize = parse_field(first.trim(), first_no)?;
        let mut columns = vec![Column::new(); m];
        let mut dims = vec![0; m];
        let mut seen = vec![false; m];
        for item in lines {
            let (line_no, line) = item?;
            let mut fields = line.split_whitespace();
            let j: usize = parse_field(fields.next().unwrap_or(""), line_no)?;
            let d: usize = parse_field(
                fields.next().ok_or(Error::Parse {
                    line: line_no,
                    message: "missing dimension".into(),
                })?,
                line_no,
            )?;
            if j == 0 || j > m {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("column {j} outside 1..={m}"),
                });
            }
            if std::mem::replace(&mut seen[j - 1], true) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("column {j} listed twice"),
                });
            }
            columns[j - 1] = fields
                .map(|f| parse_field(f, line_no))
                .collect::<Result<_>>()?;
            dims[j - 1] = d;
        }
        Self::new(columns, dims)
    }
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected an integer, found `{field}`"),
    })
}

/// The vector of `low` values, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LowVector(Vec<usize>);

impl LowVector {
    pub fn new(values: Vec<usize>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> usize {
        self.0[j - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// True iff no two nonzero entries coincide.
    pub fn is_reduced(&self) -> bool {
        self.first_collision().is_none()
    }

    /// The first `(row, earlier column, later column)` sharing a nonzero low.
    pub fn first_collision(&self) -> Option<(usize, usize, usize)> {
        let mut owner = vec![0usize; self.0.len() + 1];
        for (idx, &row) in self.0.iter().enumerate() {
            if row == 0 {
                continue;
            }
            if row >= owner.len() {
                owner.resize(row + 1, 0);
            }
            if owner[row] != 0 {
                return Some((row, owner[row], idx + 1));
            }
            owner[row] = idx + 1;
        }
        None
    }
}

impl From<Vec<usize>> for LowVector {
    fn from(values: Vec<usize>) -> Self {
        Self(values)
    }
}

impl Index<usize> for LowVector {
    type Output = usize;

    /// 1-based.
    fn index(&self, j: usize) -> &usize {
        &self.0[j - 1]
    }
}

/// True iff `low` is injective over its support.
pub fn is_reduced(low: &LowVector) -> bool {
    low.is_reduced()
}

/// Per-column lower bounds on the final low: `beta[j]` is the largest row whose
/// leftmost one sits in column `j`, or 0 if there is none.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BetaVector(Vec<usize>);

impl BetaVector {
    pub fn get(&self, j: usize) -> usize {
        self.0[j - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for BetaVector {
    fn from(values: Vec<usize>) -> Self {
        Self(values)
    }
}

/// `leftcol(i)`: the first column with a one in row `i`, or 0 for an empty row.
/// Entry `i - 1` of the result holds `leftcol(i)`.
pub fn compute_leftcol(matrix: &BoundaryMatrix) -> Vec<usize> {
    let mut left = vec![0; matrix.size()];
    for j in 1..=matrix.size() {
        for &row in matrix.column(j) {
            if left[row - 1] == 0 {
                left[row - 1] = j;
            }
        }
    }
    left
}

/// Builds beta in a single left-to-right pass, marking rows on first visit.
pub fn compute_beta(matrix: &BoundaryMatrix) -> BetaVector {
    compute_beta_counted(matrix).0
}

/// Same as [`compute_beta`], also returning the number of nonzeros inspected.
pub fn compute_beta_counted(matrix: &BoundaryMatrix) -> (BetaVector, usize) {
    let m = matrix.size();
    let mut visited = vec![false; m];
    let mut beta = vec![0; m];
    let mut inspected = 0;
    for j in 1..=m {
        for &row in matrix.column(j) {
            inspected += 1;
            if !visited[row - 1] {
                visited[row - 1] = true;
                beta[j - 1] = beta[j - 1].max(row);
            }
        }
    }
    (BetaVector(beta), inspected)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Filled triangle: three vertices, three edges, one 2-simplex.
    pub fn t7() -> BoundaryMatrix {
        BoundaryMatrix::new(
            vec![
                vec![],
                vec![],
                vec![],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3],
                vec![4, 5, 6],
            ],
            vec![0, 0, 0, 1, 1, 1, 2],
        )
        .unwrap()
    }

    /// Hollow square 1-2-4-3-1.
    pub fn s8() -> BoundaryMatrix {
        BoundaryMatrix::new(
            vec![
                vec![],
                vec![],
                vec![],
                vec![],
                vec![1, 2],
                vec![1, 3],
                vec![2, 4],
                vec![3, 4],
            ],
            vec![0, 0, 0, 0, 1, 1, 1, 1],
        )
        .unwrap()
    }

    /// Two vertices joined by an edge.
    pub fn edge3() -> BoundaryMatrix {
        BoundaryMatrix::new(vec![vec![], vec![], vec![1, 2]], vec![0, 0, 1]).unwrap()
    }
}
