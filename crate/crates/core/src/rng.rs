//! Counter-based seeding so every trial owns an independent stream.
//!
//! A trial's generator depends only on `(master, stream, trial)`, never on
//! which thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type TrialRng = ChaCha8Rng;

/// Stream identifiers keep experiments that share a master seed apart.
pub mod stream {
    pub const SOLVE: u64 = 1;
    pub const KAPPA_MOMENT: u64 = 2;
    pub const GAMMA_MOMENT: u64 = 3;
    pub const STEP_SCALING: u64 = 4;
    pub const LIPSCHITZ: u64 = 5;
    pub const SYSTEM: u64 = 6;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// 32-byte ChaCha key derived from `(master, stream, trial)`.
pub fn sub_seed(master: u64, stream: u64, trial: u64) -> [u8; 32] {
    let mut state = splitmix64(master);
    state = splitmix64(state ^ stream.rotate_left(17));
    state = splitmix64(state ^ trial.rotate_left(41));
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    seed
}

/// A 64-bit master seed for a sub-experiment, e.g. one cell of a sweep.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let s = sub_seed(master, stream, index);
    u64::from_le_bytes(s[..8].try_into().expect("8 bytes"))
}

pub fn trial_rng(master: u64, stream: u64, trial: u64) -> TrialRng {
    TrialRng::from_seed(sub_seed(master, stream, trial))
}
