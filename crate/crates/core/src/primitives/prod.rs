//! SHA-256 backed primitives for real files.
//!
//! Keystream block `i` is `SHA-256(seed ‖ i)` with `i` a 64-bit big-endian
//! counter; blocks are concatenated and truncated to the requested length.
//! The hash is SHA-256 of the serialized message, truncated to `l` bits.
//! Keyed hashing prepends the key (see [`super::ConcatKeyed`]).

use sha2::{Digest, Sha256};

use crate::bits::BitStr;
use crate::error::{Error, Result};

use super::{MessageHash, StreamCipher};

pub const SHA256_BITS: usize = 256;
const BLOCK_BYTES: usize = SHA256_BITS / 8;

#[derive(Debug, Clone, Copy)]
pub struct Sha256Stream {
    seed_len: usize,
    output_len: usize,
}

impl Sha256Stream {
    pub fn new(seed_len: usize, output_len: usize) -> Self {
        Sha256Stream {
            seed_len,
            output_len,
        }
    }
}

impl StreamCipher for Sha256Stream {
    fn seed_len(&self) -> usize {
        self.seed_len
    }

    fn output_len(&self) -> usize {
        self.output_len
    }

    fn expand(&self, seed: &BitStr) -> BitStr {
        let out_bytes = self.output_len.div_ceil(8);
        let mut out = Vec::with_capacity(out_bytes.next_multiple_of(BLOCK_BYTES));
        let prefix = Sha256::new().chain_update(seed.as_bytes());
        let mut counter = 0u64;
        while out.len() < out_bytes {
            let block = prefix.clone().chain_update(counter.to_be_bytes()).finalize();
            out.extend_from_slice(&block);
            counter += 1;
        }
        out.truncate(out_bytes);
        BitStr::from_byte_vec(out)
            .prefix(self.output_len)
            .expect("keystream covers the output length")
    }
}

/// SHA-256 truncated to `output_len <= 256` bits.
#[derive(Debug, Clone, Copy)]
pub struct Sha256Hash {
    output_len: usize,
}

impl Sha256Hash {
    pub fn new(output_len: usize) -> Result<Self> {
        if output_len == 0 || output_len > SHA256_BITS {
            return Err(Error::InvalidParams(format!(
                "SHA-256 digests are truncated to 1..=256 bits, got {output_len}"
            )));
        }
        Ok(Sha256Hash { output_len })
    }
}

impl MessageHash for Sha256Hash {
    fn output_len(&self) -> usize {
        self.output_len
    }

    fn hash(&self, msg: &BitStr) -> BitStr {
        let digest = Sha256::digest(msg.as_bytes());
        BitStr::from_byte_vec(digest.to_vec())
            .prefix(self.output_len)
            .expect("output_len <= 256")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{ConcatKeyed, KeyedHash};
    use crate::rng::{random_bits, seeded};

    const EMPTY_SHA256: &str = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";
    const ABC_SHA256: &str = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";

    #[test]
    fn published_vectors() {
        let h = Sha256Hash::new(256).unwrap();
        assert_eq!(h.hash(&BitStr::new()).to_hex(), EMPTY_SHA256);
        assert_eq!(h.hash(&BitStr::from_byte_vec(b"abc".to_vec())).to_hex(), ABC_SHA256);
    }

    #[test]
    fn first_block_is_hash_of_seed_and_zero_counter() {
        let s = Sha256Stream::new(256, 512);
        let seed = random_bits(256, &mut seeded(4));
        let out = s.keystream(&seed).unwrap();
        let mut input = seed.to_bytes();
        input.extend_from_slice(&0u64.to_be_bytes());
        assert_eq!(&out.as_bytes()[..32], Sha256::digest(&input).as_slice());
        input.truncate(32);
        input.extend_from_slice(&1u64.to_be_bytes());
        assert_eq!(&out.as_bytes()[32..], Sha256::digest(&input).as_slice());
    }

    #[test]
    fn keystream_prefix_property() {
        let mut rng = seeded(8);
        let seed = random_bits(256, &mut rng);
        let long = Sha256Stream::new(256, 5000).keystream(&seed).unwrap();
        for r in [1, 7, 255, 256, 257, 1000, 4999] {
            let short = Sha256Stream::new(256, r).keystream(&seed).unwrap();
            assert_eq!(short, long.prefix(r).unwrap());
        }
    }

    #[test]
    fn keyed_hash_prepends_key() {
        let hk = ConcatKeyed::new(Sha256Hash::new(256).unwrap(), 512, 1024);
        let mut rng = seeded(2);
        let (k, m) = (random_bits(512, &mut rng), random_bits(1024, &mut rng));
        let mut joined = k.to_bytes();
        joined.extend_from_slice(m.as_bytes());
        assert_eq!(hk.digest(&k, &m).unwrap().as_bytes(), Sha256::digest(&joined).as_slice());
    }

    #[test]
    fn truncation_takes_leading_bits() {
        let full = Sha256Hash::new(256).unwrap().hash(&BitStr::from_byte_vec(b"abc".to_vec()));
        let short = Sha256Hash::new(12).unwrap().hash(&BitStr::from_byte_vec(b"abc".to_vec()));
        assert_eq!(short, full.prefix(12).unwrap());
        assert!(Sha256Hash::new(257).is_err());
    }
}
