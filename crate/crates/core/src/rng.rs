//! Seeded randomness for experiments.
//!
//! Every random choice in a run flows from one 64-bit seed through
//! [`ChaCha8Rng`], whose output stream is fixed across platforms and crate
//! versions. Generators are always passed explicitly.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitStr;

pub type ExperimentRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniformly random bits.
pub fn random_bits<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> BitStr {
    let mut bytes = vec![0u8; n.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    if !n.is_multiple_of(8) {
        if let Some(last) = bytes.last_mut() {
            *last &= (1u8 << (n % 8)) - 1;
        }
    }
    BitStr::from_bytes(&bytes, n).expect("padding bits were cleared")
}

/// Up to `count` distinct random values of `n` bits. When the space holds
/// fewer than `count` values, repeats are unavoidable and allowed.
pub fn distinct_random_bits<R: RngCore + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<BitStr> {
    let space = if n >= 64 { u128::MAX } else { 1u128 << n };
    let mut out: Vec<BitStr> = Vec::with_capacity(count);
    while out.len() < count {
        let candidate = random_bits(n, rng);
        if (out.len() as u128) < space && out.contains(&candidate) {
            continue;
        }
        out.push(candidate);
    }
    out
}
