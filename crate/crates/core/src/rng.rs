//! Reproducible random streams.
//!
//! Every trial gets a 64-bit seed derived from the master seed and its
//! coordinates with SplitMix64 mixing. Within a trial, each purpose draws from
//! its own ChaCha8 stream (a counter-based generator keyed by the seed, with
//! the purpose as stream id), so changing e.g. the contamination rate never
//! shifts the inlier draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Inliers = 0,
    Positions = 1,
    OutlierMeans = 2,
    OutlierNoise = 3,
    Direction = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the node `path` below `master`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &part| splitmix64(acc ^ splitmix64(part)))
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
