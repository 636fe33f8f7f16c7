//! Stream-cipher and hash capabilities the ciphers are built from.
//!
//! Every capability checks its input lengths and bumps the per-thread
//! evaluation counters in [`crate::metrics`] on each call.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bits::BitStr;
use crate::error::{Error, Result};
use crate::metrics;
use crate::params::Params;

mod prod;
mod stub;
mod toy;

pub use prod::{Sha256Hash, Sha256Stream, SHA256_BITS};
pub use stub::{KeyEchoHash, ZeroHash, ZeroKeyedHash, ZeroStream};
pub use toy::{ToyFold, ToyStream, TOY_MAX_L};

/// Expands an `seed_len`-bit seed into `output_len` bits of keystream.
pub trait StreamCipher: Send + Sync + fmt::Debug {
    fn seed_len(&self) -> usize;
    fn output_len(&self) -> usize;

    /// Expansion without bookkeeping. Callers go through [`keystream`](Self::keystream).
    fn expand(&self, seed: &BitStr) -> BitStr;

    fn keystream(&self, seed: &BitStr) -> Result<BitStr> {
        if seed.len() != self.seed_len() {
            return Err(Error::dimension("stream seed", self.seed_len(), seed.len()));
        }
        metrics::count_stream_eval();
        Ok(self.expand(seed))
    }
}

/// `H_K : F^input_len -> F^output_len`, indexed by `key_len`-bit keys.
pub trait KeyedHash: Send + Sync + fmt::Debug {
    fn key_len(&self) -> usize;
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;

    fn compute(&self, key: &BitStr, msg: &BitStr) -> BitStr;

    fn digest(&self, key: &BitStr, msg: &BitStr) -> Result<BitStr> {
        if key.len() != self.key_len() {
            return Err(Error::dimension("hash key", self.key_len(), key.len()));
        }
        if msg.len() != self.input_len() {
            return Err(Error::dimension("hash input", self.input_len(), msg.len()));
        }
        metrics::count_hash_eval();
        Ok(self.compute(key, msg))
    }
}

/// `H : F^input_len -> F^output_len`.
pub trait UnkeyedHash: Send + Sync + fmt::Debug {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;

    fn compute(&self, msg: &BitStr) -> BitStr;

    fn digest(&self, msg: &BitStr) -> Result<BitStr> {
        if msg.len() != self.input_len() {
            return Err(Error::dimension("hash input", self.input_len(), msg.len()));
        }
        metrics::count_hash_eval();
        Ok(self.compute(msg))
    }
}

/// A hash of arbitrary-length input, the `H'` underneath the keyed and
/// fixed-input hashes.
pub trait MessageHash: Send + Sync + fmt::Debug {
    fn output_len(&self) -> usize;
    fn hash(&self, msg: &BitStr) -> BitStr;
}

/// `H'` restricted to `input_len`-bit messages.
#[derive(Debug, Clone)]
pub struct FixedInput<H> {
    inner: H,
    input_len: usize,
}

impl<H: MessageHash> FixedInput<H> {
    pub fn new(inner: H, input_len: usize) -> Self {
        FixedInput { inner, input_len }
    }
}

impl<H: MessageHash> UnkeyedHash for FixedInput<H> {
    fn input_len(&self) -> usize {
        self.input_len
    }

    fn output_len(&self) -> usize {
        self.inner.output_len()
    }

    fn compute(&self, msg: &BitStr) -> BitStr {
        self.inner.hash(msg)
    }
}

/// Keyed hash `H_K(M) = H'(K ‖ M)`. Concatenation at a fixed key width is
/// injective and trivially inverted by [`ConcatKeyed::decompose`].
#[derive(Debug, Clone)]
pub struct ConcatKeyed<H> {
    inner: H,
    key_len: usize,
    input_len: usize,
}

impl<H: MessageHash> ConcatKeyed<H> {
    pub fn new(inner: H, key_len: usize, input_len: usize) -> Self {
        ConcatKeyed {
            inner,
            key_len,
            input_len,
        }
    }

    /// The injective embedding `f(K, M) = K ‖ M`.
    pub fn embed(&self, key: &BitStr, msg: &BitStr) -> BitStr {
        key.concat(msg)
    }

    /// Recovers `(K, M)` from `f(K, M)`.
    pub fn decompose(&self, joined: &BitStr) -> Result<(BitStr, BitStr)> {
        if joined.len() != self.key_len + self.input_len {
            return Err(Error::dimension(
                "keyed hash embedding",
                self.key_len + self.input_len,
                joined.len(),
            ));
        }
        Ok((joined.slice(0, self.key_len)?, joined.slice(self.key_len, joined.len())?))
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }
}

impl<H: MessageHash> KeyedHash for ConcatKeyed<H> {
    fn key_len(&self) -> usize {
        self.key_len
    }

    fn input_len(&self) -> usize {
        self.input_len
    }

    fn output_len(&self) -> usize {
        self.inner.output_len()
    }

    fn compute(&self, key: &BitStr, msg: &BitStr) -> BitStr {
        self.inner.hash(&self.embed(key, msg))
    }
}

/// Which family of primitives to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveFamily {
    /// Constant-zero outputs.
    Stub,
    /// LCG keystream and multiply-add fold hash, for `l <= 16`.
    Toy,
    /// SHA-256 in counter mode and SHA-256 with a prepended key.
    Production,
}

impl FromStr for PrimitiveFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stub" => Ok(PrimitiveFamily::Stub),
            "toy" => Ok(PrimitiveFamily::Toy),
            "prod" | "production" => Ok(PrimitiveFamily::Production),
            _ => Err(Error::Parse(format!("unknown primitive family {s:?}"))),
        }
    }
}

/// The three capabilities a scheme may draw on, all sized for one [`Params`].
#[derive(Debug, Clone)]
pub struct Primitives {
    pub stream: Arc<dyn StreamCipher>,
    pub keyed_hash: Arc<dyn KeyedHash>,
    pub hash: Arc<dyn UnkeyedHash>,
}

impl Primitives {
    pub fn new(
        stream: Arc<dyn StreamCipher>,
        keyed_hash: Arc<dyn KeyedHash>,
        hash: Arc<dyn UnkeyedHash>,
    ) -> Self {
        Primitives {
            stream,
            keyed_hash,
            hash,
        }
    }

    pub fn of_family(family: PrimitiveFamily, params: &Params) -> Result<Self> {
        match family {
            PrimitiveFamily::Stub => Ok(Self::stub(params)),
            PrimitiveFamily::Toy => Self::toy(params),
            PrimitiveFamily::Production => Self::production(params),
        }
    }

    pub fn stub(params: &Params) -> Self {
        let Params { l, r, k } = *params;
        Primitives {
            stream: Arc::new(ZeroStream::new(l, r)),
            keyed_hash: Arc::new(ZeroKeyedHash::new(k, r, l)),
            hash: Arc::new(ZeroHash::new(r, l)),
        }
    }

    pub fn toy(params: &Params) -> Result<Self> {
        let Params { l, r, k } = *params;
        let fold = ToyFold::new(l)?;
        Ok(Primitives {
            stream: Arc::new(ToyStream::new(l, r)?),
            keyed_hash: Arc::new(ConcatKeyed::new(fold, k, r)),
            hash: Arc::new(FixedInput::new(fold, r)),
        })
    }

    pub fn production(params: &Params) -> Result<Self> {
        let Params { l, r, k } = *params;
        let sha = Sha256Hash::new(l)?;
        Ok(Primitives {
            stream: Arc::new(Sha256Stream::new(l, r)),
            keyed_hash: Arc::new(ConcatKeyed::new(sha, k, r)),
            hash: Arc::new(FixedInput::new(sha, r)),
        })
    }

    /// Checks that every capability is sized for `params`.
    pub fn check(&self, params: &Params) -> Result<()> {
        let Params { l, r, k } = *params;
        let checks = [
            ("stream seed", l, self.stream.seed_len()),
            ("stream output", r, self.stream.output_len()),
            ("keyed hash key", k, self.keyed_hash.key_len()),
            ("keyed hash input", r, self.keyed_hash.input_len()),
            ("keyed hash output", l, self.keyed_hash.output_len()),
            ("hash input", r, self.hash.input_len()),
            ("hash output", l, self.hash.output_len()),
        ];
        for (what, want, got) in checks {
            if want != got {
                return Err(Error::dimension(what, want, got));
            }
        }
        Ok(())
    }
}
