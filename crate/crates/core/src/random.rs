//! Seeded generators for test matrices and orthogonal transforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::spectral::{trace_free_project, Square, SymMatrix};

/// Generator for item `index` of a campaign seeded with `seed` (`seed XOR index`).
pub fn campaign_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// Symmetric matrix with upper-triangle entries uniform in `[-1, 1]`.
pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SymMatrix> {
    SymMatrix::from_upper_fn(n, |_, _| rng.gen_range(-1.0..=1.0))
}

pub fn random_trace_free<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SymMatrix> {
    Ok(trace_free_project(&random_symmetric(n, rng)?))
}

/// Orthogonal matrix composed from two passes of plane rotations over every
/// index pair, each with a uniform random angle.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Square {
    let mut q = Square::identity(n);
    for _ in 0..2 {
        for p in 0..n {
            for r in (p + 1)..n {
                let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                q.rotate_rows(p, r, angle.cos(), angle.sin());
            }
        }
    }
    q
}
