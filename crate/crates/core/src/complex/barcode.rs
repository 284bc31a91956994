use std::fmt;
use std::io::Write;

use crate::boundary::LowVector;
use crate::error::{Error, Result};
use crate::metrics::essential_mask;

use super::Filtration;

/// A persistence interval. `death` is infinite for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub birth: f64,
    pub death: f64,
    pub dim: usize,
}

impl Interval {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_essential() {
            write!(f, "{} inf {}", self.birth, self.dim)
        } else {
            write!(f, "{} {} {}", self.birth, self.death, self.dim)
        }
    }
}

/// Finite intervals in order of their death column, then essential intervals
/// in index order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Barcode {
    pub intervals: Vec<Interval>,
}

impl Barcode {
    pub fn finite(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(|i| !i.is_essential())
    }

    pub fn essential(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(|i| i.is_essential())
    }

    /// Intervals sorted by (dim, birth, death), for comparing barcodes.
    pub fn sorted(&self) -> Vec<Interval> {
        let mut v = self.intervals.clone();
        v.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        v
    }

    /// `birth death dim` per line, with `inf` for essential deaths.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for i in &self.intervals {
            writeln!(out, "{i}")?;
        }
        Ok(())
    }

    /// Inverse of [`Barcode::write_text`].
    pub fn read_text(text: &str) -> Result<Self> {
        let mut intervals = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: n + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [birth, death, dim] = fields[..] else {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
            intervals.push(Interval {
                birth: num(birth)?,
                death: num(death)?,
                dim: dim.parse().map_err(|e| bad(format!("`{dim}`: {e}")))?,
            });
        }
        Ok(Self { intervals })
    }
}

type Pairs = (Vec<(usize, usize)>, Vec<usize>);

/// Pairs `(lowstar(j), j)` and essential indices of a reduced low vector.
fn pairs(lowstar: &LowVector) -> Result<Pairs> {
    if let Some((row, first, second)) = lowstar.first_collision() {
        return Err(Error::NotInjective { row, first, second });
    }
    let finite = (1..=lowstar.len())
        .filter(|&j| lowstar.get(j) > 0)
        .map(|j| (lowstar.get(j), j))
        .collect();
    let essential = essential_mask(lowstar)
        .iter()
        .enumerate()
        .filter(|&(_, &e)| e)
        .map(|(idx, _)| idx + 1)
        .collect();
    Ok((finite, essential))
}

fn build(
    lowstar: &LowVector,
    scale: impl Fn(usize) -> f64,
    dim: impl Fn(usize) -> usize,
) -> Result<Barcode> {
    let (finite, essential) = pairs(lowstar)?;
    let mut intervals: Vec<Interval> = finite
        .into_iter()
        .map(|(i, j)| Interval {
            birth: scale(i),
            death: scale(j),
            dim: dim(i),
        })
        .collect();
    intervals.extend(essential.into_iter().map(|e| Interval {
        birth: scale(e),
        death: f64::INFINITY,
        dim: dim(e),
    }));
    Ok(Barcode { intervals })
}

/// Barcode of a filtration from the reduced low vector of its boundary matrix.
pub fn extract_pairs(filtration: &Filtration, lowstar: &LowVector) -> Result<Barcode> {
    if filtration.len() != lowstar.len() {
        return Err(Error::LengthMismatch {
            left: filtration.len(),
            right: lowstar.len(),
        });
    }
    build(
        lowstar,
        |j| filtration.simplex(j).scale,
        |j| filtration.simplex(j).dim(),
    )
}

/// Barcode in index space: each simplex enters at its own 1-based index.
pub fn extract_pairs_by_index(lowstar: &LowVector, dims: &[usize]) -> Result<Barcode> {
    if dims.len() != lowstar.len() {
        return Err(Error::LengthMismatch {
            left: dims.len(),
            right: lowstar.len(),
        });
    }
    build(lowstar, |j| j as f64, |j| dims[j - 1])
}
