//! Counter-based random substreams.
//!
//! Every random draw in a run is addressed by `(seed, domain, k, b)`: the seed
//! and domain select a ChaCha key, the iteration index `k` selects the ChaCha
//! stream, and the block index `b` selects a disjoint word range inside that
//! stream. Block schedules, evaluation order and thread counts therefore cannot
//! change which noise lands on which block.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// Words reserved per block inside one `(k)` stream.
const BLOCK_WORD_SHIFT: u32 = 36;

/// Independent purposes that draw randomness within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Gaussian privacy noise η.
    Noise,
    /// Block activation masks and permutations.
    Schedule,
    /// Item order for stochastic-gradient instances.
    Items,
    /// User subsampling in federated rounds.
    Sampling,
    /// Next hop of the decentralized random walk.
    Walk,
    /// Anything test- or bench-specific.
    Aux(u32),
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Noise => 1,
            Domain::Schedule => 2,
            Domain::Items => 3,
            Domain::Sampling => 4,
            Domain::Walk => 5,
            Domain::Aux(x) => 0x100 + u64::from(x),
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Factory for per-`(domain, k, b)` generators under one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self, domain: Domain, k: u64, b: u64) -> ChaCha8Rng {
        let mut state = self.seed ^ domain.tag().rotate_left(48);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(k);
        rng.set_word_pos(u128::from(b) << BLOCK_WORD_SHIFT);
        rng
    }

    /// `len` i.i.d. N(0, σ²) draws for block `b` at iteration `k`.
    pub fn gaussian<T: Scalar>(&self, k: u64, b: u64, len: usize, sigma: T) -> Vec<T> {
        let mut rng = self.substream(Domain::Noise, k, b);
        (0..len).map(|_| sigma * T::sample_standard_normal(&mut rng)).collect()
    }
}
