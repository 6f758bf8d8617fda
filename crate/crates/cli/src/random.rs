//! Reproducible test vectors for `certify --seed`.
//!
//! A `ChaCha8Rng` seeded with `seed_from_u64(seed)` draws, per vector:
//! the support size uniformly from `1..=support`, that many distinct indices
//! uniformly from `0..INDEX_RANGE`, and for each index a value `p/q` with
//! `p` uniform in `[-NUMERATOR_BOUND, NUMERATOR_BOUND] \ {0}` and `q` uniform
//! in `1..=DENOMINATOR_BOUND`.

use cesaro_core::cesaro::SparseVector;
use cesaro_core::exact::rat;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const INDEX_RANGE: u64 = 40;
pub const NUMERATOR_BOUND: i64 = 20;
pub const DENOMINATOR_BOUND: i64 = 20;

pub fn random_vectors(seed: u64, support: usize, count: usize) -> Vec<SparseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = support.clamp(1, INDEX_RANGE as usize);
    (0..count)
        .map(|_| {
            let size = rng.random_range(1..=support);
            let mut indices = sample(&mut rng, INDEX_RANGE as usize, size).into_vec();
            indices.sort_unstable();
            SparseVector::from_pairs(indices.into_iter().map(|idx| {
                let mut p = rng.random_range(-NUMERATOR_BOUND..NUMERATOR_BOUND);
                if p >= 0 {
                    p += 1;
                }
                let q = rng.random_range(1..=DENOMINATOR_BOUND);
                (idx as u64, rat(p, q))
            }))
        })
        .collect()
}
