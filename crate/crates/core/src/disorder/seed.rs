use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Address of one reproducible random stream.
///
/// `master_seed` keys the ChaCha20 generator, `stream_id` selects one of its
/// 2^64 independent streams (one per disorder replica). Sub-purposes inside a
/// replica (couplings, MCMC, clause structure, ...) are separated with
/// [`SeedSpec::derive`], which rekeys the master seed and keeps the stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

/// Tags used with [`SeedSpec::derive`].
pub mod tags {
    pub const CHAOS: u64 = 0x01;
    pub const RESIDUAL: u64 = 0x100;
    pub const STRUCTURE: u64 = 0x200;
    pub const MCMC: u64 = 0x300;
    pub const WEIGHTS: u64 = 0x400;
    pub const LATENT_Z: u64 = 0x500;
    pub const LATENT_Z1: u64 = 0x501;
    pub const LATENT_Z2: u64 = 0x502;
    pub const POISSON: u64 = 0x600;
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec { master_seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        SeedSpec { stream_id, ..self }
    }

    pub fn derive(self, tag: u64) -> Self {
        SeedSpec {
            master_seed: splitmix64(self.master_seed ^ splitmix64(tag.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            stream_id: self.stream_id,
        }
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
