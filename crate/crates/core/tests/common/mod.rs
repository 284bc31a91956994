#![allow(dead_code)]

use lowstar_core::{BoundaryMatrix, LowVector, PointCloud};
use proptest::prelude::*;

/// Dense GF(2) bitset column.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(m: usize) -> Self {
        Bits(vec![0; m.div_ceil(64).max(1)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn xor(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn highest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + 63 - w.leading_zeros() as usize)
    }
}

/// Incremental rank of a set of bit columns (echelon form keyed by top bit).
struct Echelon {
    rows: Vec<Option<Bits>>,
    rank: usize,
}

impl Echelon {
    fn new(m: usize) -> Self {
        Echelon {
            rows: vec![None; m],
            rank: 0,
        }
    }

    fn insert(&mut self, mut v: Bits) {
        while let Some(top) = v.highest() {
            match &self.rows[top] {
                Some(r) => v.xor(r),
                None => {
                    self.rows[top] = Some(v);
                    self.rank += 1;
                    return;
                }
            }
        }
    }
}

/// `lowstar` from ranks of lower-left submatrices, with no column reduction.
///
/// With `r(i, j)` the rank of rows `i..=m`, columns `1..=j`, the entry
/// `lowstar(j) = i` iff `r(i, j) - r(i + 1, j) - r(i, j - 1) + r(i + 1, j - 1) = 1`.
#[allow(clippy::needless_range_loop)]
pub fn rank_lowstar(matrix: &BoundaryMatrix) -> LowVector {
    let m = matrix.size();
    // r[i][j] for i in 1..=m+1, j in 0..=m
    let mut r = vec![vec![0usize; m + 1]; m + 2];
    for i in 1..=m {
        let mut ech = Echelon::new(m);
        for j in 1..=m {
            let mut v = Bits::new(m);
            for &row in matrix.column(j) {
                if row >= i {
                    v.set(row - 1);
                }
            }
            ech.insert(v);
            r[i][j] = ech.rank;
        }
    }
    let mut low = vec![0; m];
    for j in 1..=m {
        for i in 1..j {
            let x = r[i][j] + r[i + 1][j - 1];
            let y = r[i + 1][j] + r[i][j - 1];
            if x == y + 1 {
                low[j - 1] = i;
            }
        }
    }
    low.into()
}

/// Betti numbers of the whole complex from boundary ranks.
pub fn betti(matrix: &BoundaryMatrix) -> Vec<usize> {
    let m = matrix.size();
    let top = matrix.max_dim();
    let mut count = vec![0usize; top + 2];
    let mut ranks: Vec<Echelon> = (0..=top + 1).map(|_| Echelon::new(m)).collect();
    for j in 1..=m {
        let d = matrix.dim(j);
        count[d] += 1;
        let mut v = Bits::new(m);
        for &row in matrix.column(j) {
            v.set(row - 1);
        }
        ranks[d].insert(v);
    }
    (0..=top)
        .map(|d| count[d] - ranks[d].rank - ranks[d + 1].rank)
        .collect()
}

/// Clouds of 1..=`max_n` planar points. Half-integer coordinates make ties
/// in distances and duplicate points likely.
pub fn cloud(max_n: usize) -> impl Strategy<Value = PointCloud> {
    let coord = prop_oneof![(-4i32..=4).prop_map(|k| k as f64 / 2.0), -2.0f64..2.0];
    prop::collection::vec(prop::collection::vec(coord, 2), 1..=max_n)
        .prop_map(|pts| PointCloud::new(pts).unwrap())
}

/// `(r_max, divisions, max_dim)`.
pub fn params() -> impl Strategy<Value = (f64, usize, usize)> {
    (0.3f64..2.5, 1usize..=4, 1usize..=3)
}
