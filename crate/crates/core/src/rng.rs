//! Seeded randomness.
//!
//! Every random draw in the library flows from a single `u64` seed through a
//! counter-based ChaCha stream. Each use site owns a distinct stream id, so
//! repeated runs with the same seed are bit-for-bit reproducible and the
//! draws of one subsystem never shift another's.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the independent consumers of randomness.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub enum Stream {
    /// Coefficient draws for simultaneous triangularization.
    Triangularize = 1,
    /// Character construction inside the Shilov cross-check.
    ShilovCharacter = 2,
    /// Random commuting tuple fixtures.
    FixtureTuple = 3,
    /// Random Bernstein functions.
    FixturePsi = 4,
    /// Cone direction sampling.
    ConeSampling = 5,
    /// Random probe points (membership scans away from candidates).
    Probe = 6,
}

/// Deterministic generator for `(seed, stream, index)`.
///
/// `index` distinguishes repeated invocations of the same consumer, e.g. the
/// k-th fixture of a batch.
pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stream as u64) << 32 | index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_draws() {
        let a: Vec<f64> = stream_rng(7, Stream::Triangularize, 0)
            .random_iter()
            .take(8)
            .collect();
        let b: Vec<f64> = stream_rng(7, Stream::Triangularize, 0)
            .random_iter()
            .take(8)
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_are_independent() {
        let a: f64 = stream_rng(7, Stream::Triangularize, 0).random();
        let b: f64 = stream_rng(7, Stream::ConeSampling, 0).random();
        assert_ne!(a, b);
    }
}
