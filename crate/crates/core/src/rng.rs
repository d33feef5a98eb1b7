//! Seeded randomness.
//!
//! Every stochastic draw in the crate comes from a [`SimRng`], which is the
//! ChaCha stream cipher with 8 rounds (`rand_chacha::ChaCha8Rng`), seeded from
//! a 64-bit integer through `SeedableRng::seed_from_u64`. Both algorithms are
//! specified independently of platform and word size, so a seed reproduces
//! the same stream everywhere.
//!
//! Sub-streams are derived with [`derive_seed`], a SplitMix64-based split
//! function: `derive_seed(base, stream) = splitmix64(splitmix64(base) ^ stream)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream tags used with [`derive_seed`].
pub mod streams {
    /// Environment dynamics inside one episode.
    pub const ENV: u64 = 0x454e_5600;
    /// Action selection inside one episode.
    pub const POLICY: u64 = 0x504f_4c00;
    /// Per-episode seeds for training batches.
    pub const TRAIN: u64 = 0x5452_4e00;
    /// Per-episode seeds for evaluation episodes.
    pub const EVAL: u64 = 0x4556_4c00;
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(base) ^ stream)
}

/// Standard normal draw via Box-Muller.
///
/// Always consumes exactly two uniforms, so environments that call it keep a
/// fixed draw count per step and paired runs stay aligned on the same stream.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - u lies in (0, 1], keeping the logarithm finite.
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
