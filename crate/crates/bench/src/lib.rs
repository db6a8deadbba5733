//! Shared instance generators for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wseq_core::{random_weighted_sequence, Alphabet, PropertyArray, WeightedSequence};

pub fn random_instance(n: usize, sigma: usize, seed: u64) -> WeightedSequence {
    let alphabet = Alphabet::new(&b"ABCDEFGH"[..sigma]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_weighted_sequence(&alphabet, n, &mut rng).unwrap()
}

/// A random string with a random hereditary property, for suffix-structure
/// benchmarks.
pub fn random_property_string(n: usize, sigma: usize, seed: u64) -> (Vec<u8>, PropertyArray) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s: Vec<u8> = (0..n).map(|_| rng.gen_range(0..sigma as u8)).collect();
    let mut ends = Vec::with_capacity(n);
    let mut prev = 0usize;
    for i in 1..=n {
        let e = rng.gen_range(prev.max(i - 1)..=(i + 40).min(n));
        prev = e;
        ends.push(e);
    }
    (s, PropertyArray::new(ends, n).unwrap())
}
