//! Reproducible benchmark instances.

use crate::{CliResult, DataError};
use chrsolve_core::linalg::SymMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random sparse symmetric matrix together with a spin vector and its
/// value, so `x^T A x = alpha` is feasible by construction.
#[derive(Debug, Clone)]
pub struct PlantedSpin {
    pub a: SymMatrix<f64>,
    pub assignment: Vec<i8>,
    pub alpha: f64,
}

/// Off-diagonal entries appear independently with probability `density`,
/// weights uniform in [-1, 1). The planted assignment is uniform spins.
pub fn planted_spin(n: usize, density: f64, seed: u64) -> CliResult<PlantedSpin> {
    if n < 2 {
        return Err(DataError("bench: n must be at least 2".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(DataError(format!(
            "bench: density {density} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spins: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density) {
                triplets.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    let a = SymMatrix::from_triplets(n, triplets).map_err(|e| DataError(e.to_string()))?;
    let alpha = a.quad_form(&spins).map_err(|e| DataError(e.to_string()))?;
    Ok(PlantedSpin {
        a,
        assignment: spins.iter().map(|&s| if s > 0.0 { 1 } else { -1 }).collect(),
        alpha,
    })
}
