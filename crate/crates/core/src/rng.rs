//! Deterministic random sub-streams.
//!
//! Every Monte-Carlo realization draws from its own ChaCha8 stream selected by
//! `(seed, realization, purpose)`, so results do not depend on the order or
//! thread in which realizations run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes per realization.
pub const PURPOSES: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Channel = 0,
    /// Measurement noise; shared by every codebook searched on the realization.
    Noise = 1,
}

pub fn substream(seed: u64, realization: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(
        realization
            .wrapping_mul(PURPOSES)
            .wrapping_add(purpose as u64),
    );
    rng
}
