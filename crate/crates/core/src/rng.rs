//! Seeded random streams.
//!
//! Every run derives its generators from one `u64` seed. Streams are
//! addressed by purpose so that the order in which samples are processed
//! (sequential or parallel) never changes the numbers a sample sees:
//!
//! | stream                      | consumer                                  |
//! |-----------------------------|-------------------------------------------|
//! | `0`                         | initialization chain (double MH, AMH)     |
//! | `(t << 32) \| i`            | sample `i` in generation `t` (`t >= 1`)   |
//! | `(t << 32) \| 0xFFFF_FFFF`  | population control in generation `t`      |
//! | `1 << 62`                   | synthetic measurement noise               |
//!
//! Within a sample stream the draws are consumed in a fixed order:
//! proposal, auxiliary batch (skipped for out-of-bounds proposals), then
//! the uniform for the R-type move.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const CONTROL_INDEX: u64 = 0xFFFF_FFFF;

pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn synthetic_stream(seed: u64) -> StreamRng {
    stream(seed, 1 << 62)
}

pub fn init_stream(seed: u64) -> StreamRng {
    stream(seed, 0)
}

pub fn sample_stream(seed: u64, generation: usize, index: usize) -> StreamRng {
    debug_assert!(generation >= 1);
    debug_assert!((index as u64) < CONTROL_INDEX);
    stream(seed, ((generation as u64) << 32) | index as u64)
}

pub fn control_stream(seed: u64, generation: usize) -> StreamRng {
    stream(seed, ((generation as u64) << 32) | CONTROL_INDEX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = sample_stream(7, 1, 0).random();
        let b: u64 = sample_stream(7, 1, 1).random();
        let c: u64 = sample_stream(7, 2, 0).random();
        let d: u64 = control_stream(7, 1).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_eq!(a, sample_stream(7, 1, 0).random::<u64>());
    }
}
