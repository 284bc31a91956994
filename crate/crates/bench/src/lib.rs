//! Shared fixtures for the reduction benchmarks.

use lowstar_core::{build_vietoris_rips, sample, BoundaryMatrix, Ensemble};

/// Boundary matrix of a sampled Vietoris-Rips complex.
pub fn fixture(ensemble: Ensemble, n: usize, seed: u64, r_max: f64, max_dim: usize) -> BoundaryMatrix {
    let cloud = sample(ensemble, n, seed, 0.05).expect("valid sampler arguments");
    build_vietoris_rips(&cloud, r_max, 10, max_dim)
        .expect("valid filtration arguments")
        .boundary_matrix()
}
