//! Splittable, reproducible random streams.
//!
//! A [`Streams`] value wraps one master seed. Any sub-stream is addressed by
//! a short path of integers (domain tag, grid index, trial index, ...), which
//! is hashed into a ChaCha8 key. Sub-streams are therefore independent of
//! the order or thread in which they are requested.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keeping unrelated consumers of the master seed apart.
pub mod domain {
    pub const INIT_RX: u64 = 1;
    pub const INIT_TX: u64 = 2;
    pub const TRAIN: u64 = 3;
    pub const EVAL: u64 = 4;
    pub const CHANNEL_CHECK: u64 = 5;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    master: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Streams {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Key derived from the master seed and `path`.
    pub fn key(&self, path: &[u64]) -> [u8; 32] {
        let mut state = self.master;
        // absorb the path one word at a time, then squeeze four words
        for &p in path {
            splitmix64(&mut state);
            state ^= p.wrapping_mul(0xD6E8_FEB8_6659_FD93);
        }
        state ^= (path.len() as u64).rotate_left(32);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        key
    }

    /// Generator for the sub-stream at `path`.
    pub fn rng(&self, path: &[u64]) -> StreamRng {
        ChaCha8Rng::from_seed(self.key(path))
    }

    /// Generator for trial `trial` under `path`: the key comes from `path`
    /// and the trial selects one of ChaCha's 2^64 streams.
    pub fn trial_rng(&self, path: &[u64], trial: u64) -> StreamRng {
        let mut rng = self.rng(path);
        rng.set_stream(trial);
        rng
    }
}

/// Cheap factory for many trial streams sharing one key.
#[derive(Clone)]
pub struct TrialStreams {
    base: StreamRng,
}

impl TrialStreams {
    pub fn new(streams: &Streams, path: &[u64]) -> Self {
        Self {
            base: streams.rng(path),
        }
    }

    pub fn trial(&self, trial: u64) -> StreamRng {
        let mut rng = self.base.clone();
        rng.set_stream(trial);
        rng
    }
}
