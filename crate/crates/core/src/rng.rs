//! Seeded, per-index random streams.
//!
//! Every sample index gets its own ChaCha8 stream derived from the user seed,
//! so a batch is a deterministic function of `(seed, index)` no matter how it
//! is chunked across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples handled per parallel work item. Partial sums are combined in
/// chunk order, which keeps floating-point reductions reproducible.
pub const CHUNK: usize = 4096;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A family of independent streams keyed by sample index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSeed(u64);

impl StreamSeed {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    /// An unrelated family for a different purpose (fixtures, nulls, …).
    pub fn derive(&self, tag: u64) -> StreamSeed {
        StreamSeed(mix64(self.0 ^ mix64(tag)))
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

/// Maps `f(index, rng)` over `0..count` in parallel, preserving order.
pub fn par_map_indexed<T, F>(seed: StreamSeed, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| {
            let mut rng = seed.stream(i as u64);
            f(i, &mut rng)
        })
        .collect()
}

/// Runs `f` over fixed-size index chunks in parallel and returns the
/// per-chunk results in chunk order.
pub fn par_chunks<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            f(start..(start + CHUNK).min(count))
        })
        .collect()
}
