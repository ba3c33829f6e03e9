//! Seeded random streams.
//!
//! Every random quantity in the crate comes from a [`ChaCha8Rng`] whose key is
//! a user-supplied seed and whose stream id encodes what the stream is used
//! for. Two streams never share a (key, stream id) pair, so runs can be
//! executed in any order or in parallel and still draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Purpose of a per-seed stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    /// Initial policy / population draw. Shared by a learner and its reference
    /// integrator so both start from the same point.
    Init = 0,
    /// Everything sampled while the dynamic runs.
    Dynamics = 1,
}

const LANES: u64 = 2;

// Environment streams live at the top of the stream id space, far away from
// per-seed streams.
const ENV_DRAW_STREAM: u64 = u64::MAX;
const ENV_ESTIMATE_BASE: u64 = u64::MAX - 1;

/// Stream for seed `index` of an experiment whose base seed is `base_seed`.
pub fn seed_stream(base_seed: u64, index: u64, lane: Lane) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index * LANES + lane as u64);
    rng
}

pub(crate) fn env_draw_stream(env_seed: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(env_seed);
    rng.set_stream(ENV_DRAW_STREAM);
    rng
}

pub(crate) fn env_estimate_stream(env_seed: u64, arm: usize) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(env_seed);
    rng.set_stream(ENV_ESTIMATE_BASE - arm as u64);
    rng
}
