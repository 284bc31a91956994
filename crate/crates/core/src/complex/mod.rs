//! Point clouds and Vietoris-Rips filtrations.

mod barcode;
mod io;

use std::collections::HashMap;

use crate::boundary::{BoundaryMatrix, Column};
use crate::error::{Error, Result};

pub use barcode::{extract_pairs, extract_pairs_by_index, Barcode, Interval};

/// A finite set of points in `R^d` under the Euclidean metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyCloud)?.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: 1,
                found: 0,
            });
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            if !p.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.points[a]
            .iter()
            .zip(&self.points[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// A simplex of a filtration. Vertices are 0-based point ids, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub scale: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Simplices in a compatible order: faces first, scales non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    scale_grid: Vec<f64>,
}

impl Filtration {
    /// Checks that the order is compatible.
    pub fn new(simplices: Vec<Simplex>, scale_grid: Vec<f64>) -> Result<Self> {
        let f = Self {
            simplices,
            scale_grid,
        };
        f.face_indices()?;
        for (idx, pair) in f.simplices.windows(2).enumerate() {
            if pair[1].scale < pair[0].scale {
                return Err(Error::InvalidParameter(format!(
                    "simplex {} enters at scale {} after scale {}",
                    idx + 2,
                    pair[1].scale,
                    pair[0].scale
                )));
            }
        }
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Simplex at 1-based index `j`.
    pub fn simplex(&self, j: usize) -> &Simplex {
        &self.simplices[j - 1]
    }

    /// `r_1 < ... < r_T`.
    pub fn scale_grid(&self) -> &[f64] {
        &self.scale_grid
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    /// 1-based indices of the codimension-one faces of each simplex, ascending.
    fn face_indices(&self) -> Result<Vec<Column>> {
        let mut index: HashMap<&[usize], usize> = HashMap::with_capacity(self.len());
        let mut columns = Vec::with_capacity(self.len());
        for (pos, s) in self.simplices.iter().enumerate() {
            let j = pos + 1;
            if s.vertices.is_empty() || !s.vertices.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "simplex {j} vertices must be nonempty and strictly ascending"
                )));
            }
            if !s.scale.is_finite() || s.scale < 0.0 {
                return Err(Error::InvalidParameter(format!("simplex {j} has invalid scale")));
            }
            let mut col = Vec::with_capacity(s.vertices.len());
            if s.vertices.len() > 1 {
                let mut face = Vec::with_capacity(s.vertices.len() - 1);
                for skip in 0..s.vertices.len() {
                    face.clear();
                    face.extend(
                        s.vertices
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != skip)
                            .map(|(_, &v)| v),
                    );
                    let i = *index.get(face.as_slice()).ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "simplex {j} appears before its face {face:?}"
                        ))
                    })?;
                    col.push(i);
                }
                col.sort_unstable();
            }
            if index.insert(&s.vertices, j).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "simplex {j} {:?} is listed twice",
                    s.vertices
                )));
            }
            columns.push(col);
        }
        Ok(columns)
    }

    pub fn boundary_matrix(&self) -> BoundaryMatrix {
        let columns = self
            .face_indices()
            .expect("filtration order is validated on construction");
        let dims = self.simplices.iter().map(Simplex::dim).collect();
        BoundaryMatrix::new(columns, dims).expect("faces precede cofaces")
    }
}

/// Grid level `i` in `1..=divisions` of the smallest `r_i = i * r_max / divisions`
/// with `diam <= 2 r_i`, or `None` past `r_max`.
fn entry_level(diam: f64, r_max: f64, divisions: usize) -> Option<usize> {
    let scale = |i: usize| i as f64 * r_max / divisions as f64;
    let guess = (diam * divisions as f64 / (2.0 * r_max)).ceil();
    let mut i = if guess.is_finite() && guess >= 1.0 {
        (guess as usize).min(divisions)
    } else {
        1
    };
    while i > 1 && diam <= 2.0 * scale(i - 1) {
        i -= 1;
    }
    while i <= divisions && diam > 2.0 * scale(i) {
        i += 1;
    }
    (i <= divisions).then_some(i)
}

/// Vietoris-Rips filtration on the uniform grid `r_i = i * r_max / divisions`.
///
/// A simplex of dimension at most `max_dim` enters at the first grid scale
/// `r_i` with `diam <= 2 r_i`; vertices enter at scale 0. Simplices are
/// ordered by entry scale, then dimension, then vertex set.
pub fn build_vietoris_rips(
    cloud: &PointCloud,
    r_max: f64,
    divisions: usize,
    max_dim: usize,
) -> Result<Filtration> {
    if !r_max.is_finite() || r_max <= 0.0 {
        return Err(Error::InvalidParameter(format!("r_max must be positive, got {r_max}")));
    }
    if divisions == 0 {
        return Err(Error::InvalidParameter("divisions must be at least 1".into()));
    }
    if max_dim == 0 {
        return Err(Error::InvalidParameter("max_dim must be at least 1".into()));
    }
    let n = cloud.len();
    // upper[a]: neighbours b > a with their edge level
    let mut upper: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut level = vec![0usize; n * n];
    for a in 0..n {
        for b in a + 1..n {
            if let Some(l) = entry_level(cloud.distance(a, b), r_max, divisions) {
                upper[a].push((b, l));
                level[a * n + b] = l;
                level[b * n + a] = l;
            }
        }
    }

    let mut entries: Vec<(usize, Vec<usize>)> = (0..n).map(|v| (0, vec![v])).collect();
    let mut frontier: Vec<(usize, Vec<usize>)> = (0..n)
        .flat_map(|a| upper[a].iter().map(move |&(b, l)| (l, vec![a, b])))
        .collect();
    for _ in 1..=max_dim {
        let mut next = Vec::new();
        for (l, simplex) in &frontier {
            let last = *simplex.last().unwrap();
            for &(v, _) in &upper[last] {
                let mut lvl = *l;
                let joins_all = simplex.iter().all(|&u| {
                    let e = level[u * n + v];
                    lvl = lvl.max(e);
                    e > 0
                });
                if joins_all {
                    let mut s = simplex.clone();
                    s.push(v);
                    next.push((lvl, s));
                }
            }
        }
        entries.append(&mut frontier);
        frontier = next;
    }
    entries.sort_unstable_by(|(la, a), (lb, b)| (la, a.len(), a).cmp(&(lb, b.len(), b)));

    let grid: Vec<f64> = (1..=divisions)
        .map(|i| i as f64 * r_max / divisions as f64)
        .collect();
    let simplices = entries
        .into_iter()
        .map(|(l, vertices)| Simplex {
            vertices,
            scale: if l == 0 { 0.0 } else { grid[l - 1] },
        })
        .collect();
    Ok(Filtration {
        simplices,
        scale_grid: grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> PointCloud {
        let h = 3f64.sqrt() / 2.0;
        PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap()
    }

    #[test]
    fn cloud_validation() {
        assert!(matches!(PointCloud::new(vec![]), Err(Error::EmptyCloud)));
        assert!(matches!(
            PointCloud::new(vec![vec![0.0], vec![0.0, 1.0]]),
            Err(Error::DimensionMismatch { index: 1, .. })
        ));
        assert!(matches!(
            PointCloud::new(vec![vec![f64::NAN]]),
            Err(Error::NonFinite { index: 0 })
        ));
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(c.distance(0, 1), 5.0);
    }

    #[test]
    fn unit_triangle_gives_seven_simplices() {
        let f = build_vietoris_rips(&triangle(), 1.0, 1, 2).unwrap();
        assert_eq!(f.len(), 7);
        let verts: Vec<Vec<usize>> = f.simplices().iter().map(|s| s.vertices.clone()).collect();
        assert_eq!(
            verts,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
        let scales: Vec<f64> = f.simplices().iter().map(|s| s.scale).collect();
        assert_eq!(scales, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        let m = f.boundary_matrix();
        assert_eq!(m.column(7), &[4, 5, 6]);
        assert_eq!(m.column(6), &[2, 3]);
    }

    #[test]
    fn single_point_and_far_pair() {
        let one = PointCloud::new(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let f = build_vietoris_rips(&one, 5.0, 10, 5).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.simplex(1).scale, 0.0);

        let far = PointCloud::new(vec![vec![0.0], vec![10.0]]).unwrap();
        let f = build_vietoris_rips(&far, 1.0, 1, 2).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.boundary_matrix().nnz(), 0);
    }

    #[test]
    fn grid_levels_are_tight() {
        assert_eq!(entry_level(0.0, 5.0, 10), Some(1));
        assert_eq!(entry_level(1.0, 5.0, 10), Some(1));
        assert_eq!(entry_level(1.0000001, 5.0, 10), Some(2));
        assert_eq!(entry_level(10.0, 5.0, 10), Some(10));
        assert_eq!(entry_level(10.5, 5.0, 10), None);
        // 2 r_3 = 2 * (3 * 0.3 / 3) is exactly what the builder compares against
        assert_eq!(entry_level(0.6, 0.3, 3), Some(3));
    }

    #[test]
    fn edges_enter_at_grid_scales_and_order_is_compatible() {
        let c = PointCloud::new(vec![vec![0.0], vec![1.0], vec![2.5], vec![2.5]]).unwrap();
        let f = build_vietoris_rips(&c, 2.0, 4, 3).unwrap();
        // duplicate points join at the first grid scale
        let dup = f.simplices().iter().find(|s| s.vertices == [2, 3]).unwrap();
        assert_eq!(dup.scale, 0.5);
        let e01 = f.simplices().iter().find(|s| s.vertices == [0, 1]).unwrap();
        assert_eq!(e01.scale, 0.5);
        let e02 = f.simplices().iter().find(|s| s.vertices == [0, 2]).unwrap();
        assert_eq!(e02.scale, 1.5);
        let tet = f.simplices().iter().find(|s| s.vertices.len() == 4).unwrap();
        assert_eq!(tet.scale, 1.5);
        assert_eq!(f.len(), 15);
        Filtration::new(f.simplices().to_vec(), f.scale_grid().to_vec()).unwrap();
    }

    #[test]
    fn max_dim_truncates() {
        let f = build_vietoris_rips(&triangle(), 1.0, 1, 1).unwrap();
        assert_eq!(f.len(), 6);
        assert_eq!(f.max_dim(), 1);
    }

    #[test]
    fn bad_parameters() {
        let c = triangle();
        assert!(build_vietoris_rips(&c, 0.0, 1, 1).is_err());
        assert!(build_vietoris_rips(&c, 1.0, 0, 1).is_err());
        assert!(build_vietoris_rips(&c, 1.0, 1, 0).is_err());
    }

    #[test]
    fn incompatible_orders_are_rejected() {
        let v = |vs: &[usize], scale| Simplex {
            vertices: vs.to_vec(),
            scale,
        };
        assert!(Filtration::new(vec![v(&[0], 0.0), v(&[0, 1], 1.0), v(&[1], 0.0)], vec![]).is_err());
        assert!(Filtration::new(vec![v(&[0], 1.0), v(&[1], 0.0)], vec![]).is_err());
        assert!(Filtration::new(vec![v(&[0], 0.0), v(&[0], 0.0)], vec![]).is_err());
        assert!(Filtration::new(vec![v(&[1, 0], 0.0)], vec![]).is_err());
    }
}
