//! Named random streams.
//!
//! Every random consumer in a simulation draws from its own ChaCha stream
//! whose seed is derived from `(master seed, label, index)`. Adding a new
//! consumer never shifts the draws seen by existing ones, and the walk
//! streams do not depend on which control scheme is running.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit seed for the stream `label[index]` under `master`.
pub fn stream_seed(master: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label, then mix with master and index.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(splitmix64(master ^ h).wrapping_add(splitmix64(index.wrapping_add(h))))
}

pub fn stream(master: u64, label: &str, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(master, label, index))
}

/// Seed of replication `rep` under `master`. A single `run` is replication 0.
pub fn replication_seed(master: u64, rep: u64) -> u64 {
    stream_seed(master, "replication", rep)
}

pub mod labels {
    pub const WALK: &str = "walk";
    pub const S1_TIMER: &str = "s1-timer";
    pub const SFC: &str = "sfc-channel";
    pub const S3_DELAY: &str = "s3-delay";
    pub const RANGING: &str = "ranging";
}
