//! Seeded point-cloud samplers.
//!
//! All samplers draw from Xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`), so a seed reproduces the same cloud
//! on every platform.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::complex::PointCloud;
use crate::error::{Error, Result};

pub const DEFAULT_JITTER: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ensemble {
    /// Standard normal points in `R^3`.
    Gaussian3d,
    /// Lemniscate `(sin t, sin t cos t)`.
    Figure8,
    /// Trefoil knot `(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)`.
    Trefoil,
    /// Pairs of uniform points on the unit 2-sphere, in `R^6`.
    SphereProduct,
}

impl Ensemble {
    pub const ALL: [Ensemble; 4] = [
        Ensemble::Gaussian3d,
        Ensemble::Figure8,
        Ensemble::Trefoil,
        Ensemble::SphereProduct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Ensemble::Gaussian3d => "gaussian3d",
            Ensemble::Figure8 => "figure8",
            Ensemble::Trefoil => "trefoil",
            Ensemble::SphereProduct => "sphere_product",
        }
    }

    /// Whether `jitter` applies. Curves are sampled on a parameter grid and
    /// perturbed; the other ensembles are random already.
    pub fn is_curve(self) -> bool {
        matches!(self, Ensemble::Figure8 | Ensemble::Trefoil)
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::UnknownEnsemble(s.to_string()))
    }
}

fn unit_sphere(rng: &mut Xoshiro256PlusPlus) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.map(|x| x / norm);
        }
    }
}

/// Draws `n` points. Curve ensembles use `t_k = 2 pi k / n` plus Gaussian
/// noise of standard deviation `jitter` on every coordinate.
pub fn sample(ensemble: Ensemble, n: usize, seed: u64, jitter: f64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !jitter.is_finite() || jitter < 0.0 {
        return Err(Error::InvalidParameter(format!("jitter must be nonnegative, got {jitter}")));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let points = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            let mut p = match ensemble {
                Ensemble::Gaussian3d => (0..3).map(|_| rng.sample(StandardNormal)).collect(),
                Ensemble::Figure8 => vec![t.sin(), t.sin() * t.cos()],
                Ensemble::Trefoil => vec![
                    t.sin() + 2.0 * (2.0 * t).sin(),
                    t.cos() - 2.0 * (2.0 * t).cos(),
                    -(3.0 * t).sin(),
                ],
                Ensemble::SphereProduct => {
                    let mut v = unit_sphere(&mut rng).to_vec();
                    v.extend(unit_sphere(&mut rng));
                    v
                }
            };
            if ensemble.is_curve() && jitter > 0.0 {
                for x in &mut p {
                    *x += jitter * rng.sample::<f64, _>(StandardNormal);
                }
            }
            p
        })
        .collect();
    PointCloud::new(points)
}
