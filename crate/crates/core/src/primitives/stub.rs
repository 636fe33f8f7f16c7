//! Degenerate primitives for identity and boundary tests.

use crate::bits::BitStr;

use super::{KeyedHash, StreamCipher, UnkeyedHash};

/// `S(x) = 0^r`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroStream {
    seed_len: usize,
    output_len: usize,
}

impl ZeroStream {
    pub fn new(seed_len: usize, output_len: usize) -> Self {
        ZeroStream {
            seed_len,
            output_len,
        }
    }
}

impl StreamCipher for ZeroStream {
    fn seed_len(&self) -> usize {
        self.seed_len
    }

    fn output_len(&self) -> usize {
        self.output_len
    }

    fn expand(&self, _seed: &BitStr) -> BitStr {
        BitStr::zeros(self.output_len)
    }
}

/// `H_K(M) = 0^l`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroKeyedHash {
    key_len: usize,
    input_len: usize,
    output_len: usize,
}

impl ZeroKeyedHash {
    pub fn new(key_len: usize, input_len: usize, output_len: usize) -> Self {
        ZeroKeyedHash {
            key_len,
            input_len,
            output_len,
        }
    }
}

impl KeyedHash for ZeroKeyedHash {
    fn key_len(&self) -> usize {
        self.key_len
    }

    fn input_len(&self) -> usize {
        self.input_len
    }

    fn output_len(&self) -> usize {
        self.output_len
    }

    fn compute(&self, _key: &BitStr, _msg: &BitStr) -> BitStr {
        BitStr::zeros(self.output_len)
    }
}

/// `H(M) = 0^l`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroHash {
    input_len: usize,
    output_len: usize,
}

impl ZeroHash {
    pub fn new(input_len: usize, output_len: usize) -> Self {
        ZeroHash {
            input_len,
            output_len,
        }
    }
}

impl UnkeyedHash for ZeroHash {
    fn input_len(&self) -> usize {
        self.input_len
    }

    fn output_len(&self) -> usize {
        self.output_len
    }

    fn compute(&self, _msg: &BitStr) -> BitStr {
        BitStr::zeros(self.output_len)
    }
}

/// `H_K(M) = K`, with key length equal to output length. Surjective in the
/// key for every message.
#[derive(Debug, Clone, Copy)]
pub struct KeyEchoHash {
    len: usize,
    input_len: usize,
}

impl KeyEchoHash {
    pub fn new(len: usize, input_len: usize) -> Self {
        KeyEchoHash { len, input_len }
    }
}

impl KeyedHash for KeyEchoHash {
    fn key_len(&self) -> usize {
        self.len
    }

    fn input_len(&self) -> usize {
        self.input_len
    }

    fn output_len(&self) -> usize {
        self.len
    }

    fn compute(&self, key: &BitStr, _msg: &BitStr) -> BitStr {
        key.clone()
    }
}
