//! Counter-based random streams.
//!
//! Every draw in a simulation comes from a stream addressed by
//! `(seed, round, purpose)`. Agent randomness and environment noise therefore
//! never share state, and replaying one round needs no history.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// Environment observation noise.
    Env = 1,
    /// Agent decision sampling.
    Agent = 2,
    /// Bernoulli reduction of bounded rewards.
    Reduce = 3,
    /// Generation of synthetic scripts.
    Script = 4,
    /// Miscellaneous agent-internal randomness (Thompson samples).
    AgentInternal = 5,
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The stream for `(seed, round, purpose)`.
pub fn stream(seed: u64, round: u64, purpose: Purpose) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(purpose as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(round);
    rng
}
