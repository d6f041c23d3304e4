//! Shared fixtures for the criterion benchmarks.

use driftpool_core::ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian batch centered at `mean` with unit variance.
pub fn gaussian_batch(rows: usize, cols: usize, mean: f64, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((rows, cols), |_| {
        mean + rng.random_range(-1.0..1.0) + rng.random_range(-1.0..1.0)
    })
}
