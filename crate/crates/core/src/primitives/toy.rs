//! Desk-scale primitives small enough to enumerate exhaustively.
//!
//! The keystream is the high bit of the LCG `y <- 5y + 1 (mod 2^l)` seeded
//! with the seed's integer value; `a = 5, c = 1` give full period and the
//! low LCG bit alternates, so only the top bit is emitted. The hash folds
//! `l`-bit chunks with `h <- 5(h ^ chunk) + 3 (mod 2^l)` and applies one more
//! `h <- 5h + 3` at the end.

use crate::bits::BitStr;
use crate::error::{Error, Result};

use super::{MessageHash, StreamCipher};

pub const TOY_MAX_L: usize = 16;

fn check_l(l: usize) -> Result<()> {
    if l == 0 || l > TOY_MAX_L {
        return Err(Error::InvalidParams(format!(
            "toy primitives need 1 <= l <= {TOY_MAX_L}, got {l}"
        )));
    }
    Ok(())
}

#[inline]
fn mask(l: usize) -> u64 {
    (1u64 << l) - 1
}

#[derive(Debug, Clone, Copy)]
pub struct ToyStream {
    l: usize,
    r: usize,
}

impl ToyStream {
    pub fn new(l: usize, r: usize) -> Result<Self> {
        check_l(l)?;
        Ok(ToyStream { l, r })
    }
}

impl StreamCipher for ToyStream {
    fn seed_len(&self) -> usize {
        self.l
    }

    fn output_len(&self) -> usize {
        self.r
    }

    fn expand(&self, seed: &BitStr) -> BitStr {
        let m = mask(self.l);
        let top = self.l - 1;
        let mut y = seed.to_uint().expect("seed fits in 16 bits");
        let mut out = BitStr::zeros(self.r);
        for i in 0..self.r {
            y = (5 * y + 1) & m;
            if (y >> top) & 1 == 1 {
                out.set_bit(i, true);
            }
        }
        out
    }
}

/// The fold hash `H'` with `l`-bit output, over messages of any length.
#[derive(Debug, Clone, Copy)]
pub struct ToyFold {
    l: usize,
}

impl ToyFold {
    pub fn new(l: usize) -> Result<Self> {
        check_l(l)?;
        Ok(ToyFold { l })
    }

    #[inline]
    fn step(&self, h: u64, chunk: u64) -> u64 {
        ((h ^ chunk) * 5 + 3) & mask(self.l)
    }
}

impl MessageHash for ToyFold {
    fn output_len(&self) -> usize {
        self.l
    }

    fn hash(&self, msg: &BitStr) -> BitStr {
        let l = self.l;
        let chunks = msg.len().div_ceil(l);
        let mut h = 0u64;
        if let Some(v) = msg.to_uint() {
            for i in 0..chunks {
                h = self.step(h, (v >> (i * l)) & mask(l));
            }
        } else {
            for i in 0..chunks {
                let end = ((i + 1) * l).min(msg.len());
                let chunk = msg.slice(i * l, end).expect("chunk in range");
                h = self.step(h, chunk.to_uint().expect("chunk fits"));
            }
        }
        BitStr::from_uint((5 * h + 3) & mask(l), l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{ConcatKeyed, FixedInput, KeyedHash, UnkeyedHash};

    /// Bit-list reimplementation of the keystream, written from the recurrence
    /// definition without sharing code with `ToyStream`.
    fn oracle_stream(l: u32, r: usize, seed: u32) -> Vec<bool> {
        let modulus = 1u32 << l;
        let mut y = seed;
        (0..r)
            .map(|_| {
                y = (5 * y + 1) % modulus;
                y >= modulus / 2
            })
            .collect()
    }

    /// Bit-list reimplementation of the fold hash.
    fn oracle_fold(l: usize, msg: &[bool]) -> u32 {
        let modulus = 1u32 << l;
        let mut h = 0u32;
        for chunk in msg.chunks(l) {
            let c = chunk.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i));
            h = ((h ^ c) * 5 + 3) % modulus;
        }
        (5 * h + 3) % modulus
    }

    fn to_bools(x: &BitStr) -> Vec<bool> {
        x.bits().collect()
    }

    #[test]
    fn keystream_golden_seed_3() {
        assert_eq!(
            oracle_stream(4, 8, 3),
            vec![false, false, false, true, true, true, false, true]
        );
        let s = ToyStream::new(4, 8).unwrap();
        let out = s.keystream(&BitStr::from_uint(3, 4)).unwrap();
        assert_eq!(out.as_bytes(), &[0xB8]);
    }

    #[test]
    fn keystream_zero_seed_first_bit() {
        let s = ToyStream::new(4, 8).unwrap();
        assert!(!s.keystream(&BitStr::zeros(4)).unwrap().bit(0));
    }

    #[test]
    fn keystream_matches_oracle_exhaustively() {
        for l in 1..=10u32 {
            for r in [l as usize + 1, 13, 64, 70] {
                let s = ToyStream::new(l as usize, r).unwrap();
                for seed in 0..(1u32 << l) {
                    let out = s.keystream(&BitStr::from_uint(seed as u64, l as usize)).unwrap();
                    assert_eq!(to_bools(&out), oracle_stream(l, r, seed), "l={l} r={r} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn hash_golden_values() {
        let fold = ToyFold::new(4).unwrap();
        assert_eq!(oracle_fold(4, &[false; 8]), 13);
        assert_eq!(oracle_fold(4, &[false; 12]), 4);
        let h = FixedInput::new(fold, 8);
        assert_eq!(h.digest(&BitStr::zeros(8)).unwrap().to_uint(), Some(13));
        let hk = ConcatKeyed::new(fold, 4, 8);
        assert_eq!(hk.digest(&BitStr::zeros(4), &BitStr::zeros(8)).unwrap().to_uint(), Some(4));
    }

    #[test]
    fn keyed_hash_is_fold_of_concatenation_exhaustive() {
        let fold = ToyFold::new(4).unwrap();
        let hk = ConcatKeyed::new(fold, 4, 8);
        for key in 0..16u64 {
            for msg in 0..256u64 {
                let (k, m) = (BitStr::from_uint(key, 4), BitStr::from_uint(msg, 8));
                let mut joined = to_bools(&k);
                joined.extend(to_bools(&m));
                assert_eq!(hk.digest(&k, &m).unwrap().to_uint(), Some(oracle_fold(4, &joined) as u64));
                assert_eq!(hk.digest(&k, &m).unwrap(), fold.hash(&k.concat(&m)));
            }
        }
    }

    #[test]
    fn hash_pads_partial_chunks_and_long_inputs() {
        let fold = ToyFold::new(5).unwrap();
        let mut msg = BitStr::zeros(83);
        for i in (0..83).step_by(3) {
            msg.set_bit(i, true);
        }
        assert_eq!(fold.hash(&msg).to_uint(), Some(oracle_fold(5, &to_bools(&msg)) as u64));
        let short = BitStr::from_uint(0b1011001, 7);
        assert_eq!(fold.hash(&short).to_uint(), Some(oracle_fold(5, &to_bools(&short)) as u64));
    }

    #[test]
    fn toy_scale_is_capped() {
        assert!(ToyStream::new(17, 20).is_err());
        assert!(ToyFold::new(0).is_err());
        assert!(ToyFold::new(16).is_ok());
    }
}
