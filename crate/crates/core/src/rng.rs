//! Seed derivation and the random number generator used throughout the crate.
//!
//! Every stochastic quantity is generated from a 64-bit seed that is derived
//! from a root seed and an index with [`child_seed`]. Work items never share a
//! stream, so results do not depend on how work is scheduled across threads.
//!
//! The generator is xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Both the generator and the
//! derivation below are frozen: changing either changes every table and
//! report produced from a given root seed.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator type used by all simulators and samplers.
pub type Rng64 = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of work item `index` under `root`.
///
/// `child_seed(root, i) = mix64(mix64(root) + (i + 1) * 0x9E3779B97F4A7C15)`
/// (wrapping arithmetic). For a fixed root the map is a bijection of the
/// index, so distinct indices never collide.
#[inline]
pub fn child_seed(root: u64, index: u64) -> u64 {
    mix64(mix64(root).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Fresh generator for a derived seed.
#[inline]
pub fn rng_from_seed(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}

/// Uniform variate on the open interval (0, 1), 53 bits of resolution.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard exponential variate by inversion.
#[inline]
pub fn std_exponential<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -open_unit(rng).ln()
}

/// Uniform index in `0..n` (n > 0), Lemire's multiply-shift without rejection.
///
/// The bias is below 2^-32 for the sample sizes used here.
#[inline]
pub fn uniform_index<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    (((rng.next_u64() >> 32) * n as u64) >> 32) as usize
}
