//! Seeded, splittable random streams.
//!
//! Every stochastic component draws from its own ChaCha8 stream derived from
//! a single run seed, so adding draws in one component never perturbs
//! another and reruns are bit-for-bit identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Named streams carved out of one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Alice = 1,
    Bob = 2,
    Eve = 3,
    /// Born-rule sampling of measurement outcomes.
    Nature = 4,
    Permutation = 5,
    Suite = 6,
    Message = 7,
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, stream: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Child seed for the `index`-th independent run of a batch.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(stream(7, Stream::Alice), |r, _| Some(r.random()))
            .collect();
        let b: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(stream(7, Stream::Alice), |r, _| Some(r.random()))
            .collect();
        let c: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(stream(7, Stream::Bob), |r, _| Some(r.random()))
            .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn child_seeds_differ() {
        assert_ne!(child_seed(1, 0), child_seed(1, 1));
        assert_eq!(child_seed(1, 5), child_seed(1, 5));
    }
}
