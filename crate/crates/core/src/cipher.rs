//! BEAR, LION, LIONESS, BEAR2 and LION2 over injected primitives.
//!
//! Round tables (`+` is XOR, `S` the stream cipher, `H`/`H_K` the hash):
//!
//! | scheme  | encryption |
//! |---------|------------|
//! | BEAR    | `L̄ = L + H_K1(R)`; `R' = R + S(L̄)`; `L' = L̄ + H_K2(R')` |
//! | LION    | `R̄ = R + S(L + K1)`; `L' = L + H(R̄)`; `R' = R̄ + S(L' + K2)` |
//! | LIONESS | `R̄ = R + S(L + K1)`; `L̄ = L + H_K2(R̄)`; `R' = R̄ + S(L̄ + K3)`; `L' = L̄ + H_K4(R')` |
//! | BEAR2   | `L̄ = L + H_K1(R)`; `R' = R + S(L̄ + K2)`; `L' = L̄ + H_K3(R')` |
//! | LION2   | `R̄ = R + S(L + K1)`; `L' = L + H_K2(R̄)`; `R' = R̄ + S(L' + K3)` |
//!
//! Decryption runs the rounds backwards. Wherever a key enters the stream
//! seed (`S(x + K)`), the translation `x + K` can be replaced by any regular
//! action `τ_K(x)` through [`KeyAction`].

use std::fmt;
use std::sync::Arc;

use crate::bits::BitStr;
use crate::error::{Error, Result};
use crate::params::{Block, KeyMaterial, Params, SchemeKind};
use crate::primitives::Primitives;

/// A family of permutations `τ_K` of `F^l` indexed by keys `K ∈ F^l`.
///
/// Implementations must be regular: for every `x, y` exactly one `K`
/// satisfies `τ_K(x) = y`, and [`key_between`](Self::key_between) returns it.
pub trait KeyAction: Send + Sync + fmt::Debug {
    fn apply(&self, key: &BitStr, x: &BitStr) -> Result<BitStr>;

    /// The unique `K` with `τ_K(from) = to`.
    fn key_between(&self, from: &BitStr, to: &BitStr) -> Result<BitStr>;
}

/// `τ_K(x) = x + K`, the default action.
#[derive(Debug, Clone, Copy, Default)]
pub struct Translation;

impl KeyAction for Translation {
    fn apply(&self, key: &BitStr, x: &BitStr) -> Result<BitStr> {
        x.xor(key)
    }

    fn key_between(&self, from: &BitStr, to: &BitStr) -> Result<BitStr> {
        from.xor(to)
    }
}

/// `τ_K(x) = x + K mod 2^l` on little-endian integer encodings (`l <= 64`).
#[derive(Debug, Clone, Copy, Default)]
pub struct ModularAddition;

impl ModularAddition {
    fn operands(a: &BitStr, b: &BitStr) -> Result<(u64, u64, usize)> {
        if a.len() != b.len() {
            return Err(Error::dimension("modular key action", a.len(), b.len()));
        }
        match (a.to_uint(), b.to_uint()) {
            (Some(x), Some(y)) => Ok((x, y, a.len())),
            _ => Err(Error::InvalidParams(
                "modular addition action supports at most 64-bit halves".into(),
            )),
        }
    }
}

impl KeyAction for ModularAddition {
    fn apply(&self, key: &BitStr, x: &BitStr) -> Result<BitStr> {
        let (k, v, n) = Self::operands(key, x)?;
        Ok(BitStr::from_uint(v.wrapping_add(k), n))
    }

    fn key_between(&self, from: &BitStr, to: &BitStr) -> Result<BitStr> {
        let (a, b, n) = Self::operands(from, to)?;
        Ok(BitStr::from_uint(b.wrapping_sub(a), n))
    }
}

/// Partially evaluated encryption of one block.
///
/// A half marked done already holds its ciphertext value; no later stage
/// modifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundState {
    pub left: BitStr,
    pub right: BitStr,
    original_right: BitStr,
    pub left_done: bool,
    pub right_done: bool,
}

impl RoundState {
    /// False once a finished half disagrees with `ct`.
    pub fn may_reach(&self, ct: &Block) -> bool {
        (!self.left_done || self.left == ct.left) && (!self.right_done || self.right == ct.right)
    }

    pub fn into_block(self) -> Block {
        Block::new(self.left, self.right)
    }
}

/// One of the five constructions bound to its primitives.
#[derive(Debug, Clone)]
pub struct WideBlockCipher {
    scheme: SchemeKind,
    params: Params,
    prims: Primitives,
    action: Arc<dyn KeyAction>,
}

impl WideBlockCipher {
    pub fn new(scheme: SchemeKind, params: Params, prims: Primitives) -> Result<Self> {
        params.validate_for(scheme)?;
        prims.check(&params)?;
        Ok(WideBlockCipher {
            scheme,
            params,
            prims,
            action: Arc::new(Translation),
        })
    }

    /// Replaces the translation `x + K` in every keyed stream round.
    pub fn with_key_action(mut self, action: Arc<dyn KeyAction>) -> Self {
        self.action = action;
        self
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn primitives(&self) -> &Primitives {
        &self.prims
    }

    pub fn key_action(&self) -> &dyn KeyAction {
        self.action.as_ref()
    }

    /// `S(τ_K(x))`.
    pub fn keyed_stream(&self, key: &BitStr, x: &BitStr) -> Result<BitStr> {
        self.prims.stream.keystream(&self.action.apply(key, x)?)
    }

    pub fn stream(&self, seed: &BitStr) -> Result<BitStr> {
        self.prims.stream.keystream(seed)
    }

    pub fn keyed_hash(&self, key: &BitStr, msg: &BitStr) -> Result<BitStr> {
        self.prims.keyed_hash.digest(key, msg)
    }

    pub fn hash(&self, msg: &BitStr) -> Result<BitStr> {
        self.prims.hash.digest(msg)
    }

    fn check(&self, key: &KeyMaterial, block: &Block) -> Result<()> {
        key.check(self.scheme, &self.params)?;
        block.check(&self.params)
    }

    pub fn encrypt(&self, key: &KeyMaterial, pt: &Block) -> Result<Block> {
        self.check(key, pt)?;
        let Block { left: l, right: r } = pt;
        let k = |i| key.k(i);
        let out = match self.scheme {
            SchemeKind::Bear => {
                let lb = l.xor(&self.keyed_hash(k(1), r)?)?;
                let rp = r.xor(&self.stream(&lb)?)?;
                let lp = lb.xor(&self.keyed_hash(k(2), &rp)?)?;
                Block::new(lp, rp)
            }
            SchemeKind::Lion => {
                let rb = r.xor(&self.keyed_stream(k(1), l)?)?;
                let lp = l.xor(&self.hash(&rb)?)?;
                let rp = rb.xor(&self.keyed_stream(k(2), &lp)?)?;
                Block::new(lp, rp)
            }
            SchemeKind::Lioness => {
                let rb = r.xor(&self.keyed_stream(k(1), l)?)?;
                let lb = l.xor(&self.keyed_hash(k(2), &rb)?)?;
                let rp = rb.xor(&self.keyed_stream(k(3), &lb)?)?;
                let lp = lb.xor(&self.keyed_hash(k(4), &rp)?)?;
                Block::new(lp, rp)
            }
            SchemeKind::Bear2 => {
                let lb = l.xor(&self.keyed_hash(k(1), r)?)?;
                let rp = r.xor(&self.keyed_stream(k(2), &lb)?)?;
                let lp = lb.xor(&self.keyed_hash(k(3), &rp)?)?;
                Block::new(lp, rp)
            }
            SchemeKind::Lion2 => {
                let rb = r.xor(&self.keyed_stream(k(1), l)?)?;
                let lp = l.xor(&self.keyed_hash(k(2), &rb)?)?;
                let rp = rb.xor(&self.keyed_stream(k(3), &lp)?)?;
                Block::new(lp, rp)
            }
        };
        Ok(out)
    }

    pub fn decrypt(&self, key: &KeyMaterial, ct: &Block) -> Result<Block> {
        self.check(key, ct)?;
        let Block { left: lp, right: rp } = ct;
        let k = |i| key.k(i);
        let out = match self.scheme {
            SchemeKind::Bear => {
                let lb = lp.xor(&self.keyed_hash(k(2), rp)?)?;
                let r = rp.xor(&self.stream(&lb)?)?;
                let l = lb.xor(&self.keyed_hash(k(1), &r)?)?;
                Block::new(l, r)
            }
            SchemeKind::Lion => {
                let rb = rp.xor(&self.keyed_stream(k(2), lp)?)?;
                let l = lp.xor(&self.hash(&rb)?)?;
                let r = rb.xor(&self.keyed_stream(k(1), &l)?)?;
                Block::new(l, r)
            }
            SchemeKind::Lioness => {
                let lb = lp.xor(&self.keyed_hash(k(4), rp)?)?;
                let rb = rp.xor(&self.keyed_stream(k(3), &lb)?)?;
                let l = lb.xor(&self.keyed_hash(k(2), &rb)?)?;
                let r = rb.xor(&self.keyed_stream(k(1), &l)?)?;
                Block::new(l, r)
            }
            SchemeKind::Bear2 => {
                let lb = lp.xor(&self.keyed_hash(k(3), rp)?)?;
                let r = rp.xor(&self.keyed_stream(k(2), &lb)?)?;
                let l = lb.xor(&self.keyed_hash(k(1), &r)?)?;
                Block::new(l, r)
            }
            SchemeKind::Lion2 => {
                let rb = rp.xor(&self.keyed_stream(k(3), lp)?)?;
                let l = lp.xor(&self.keyed_hash(k(2), &rb)?)?;
                let r = rb.xor(&self.keyed_stream(k(1), &l)?)?;
                Block::new(l, r)
            }
        };
        Ok(out)
    }

    /// Number of key-dependent stages; equals the number of subkeys. Stage
    /// `j` consumes `K_j` together with any keyless round that follows it.
    pub fn stage_count(&self) -> usize {
        match self.scheme {
            SchemeKind::Bear | SchemeKind::Lion => 2,
            SchemeKind::Bear2 | SchemeKind::Lion2 => 3,
            SchemeKind::Lioness => 4,
        }
    }

    /// Encryption state before any subkey is applied.
    pub fn begin(&self, pt: &Block) -> Result<RoundState> {
        pt.check(&self.params)?;
        Ok(RoundState {
            left: pt.left.clone(),
            right: pt.right.clone(),
            original_right: pt.right.clone(),
            left_done: false,
            right_done: false,
        })
    }

    /// Applies stage `j` (1-based) with subkey `K_j`. Folding all stages over
    /// `begin(pt)` yields `encrypt(key, pt)`.
    pub fn advance(&self, j: usize, subkey: &BitStr, st: &RoundState) -> Result<RoundState> {
        let mut next = st.clone();
        match (self.scheme, j) {
            (SchemeKind::Bear, 1) | (SchemeKind::Bear2, 1) => {
                next.left = st.left.xor(&self.keyed_hash(subkey, &st.original_right)?)?;
                if self.scheme == SchemeKind::Bear {
                    next.right = st.right.xor(&self.stream(&next.left)?)?;
                    next.right_done = true;
                }
            }
            (SchemeKind::Bear2, 2) => {
                next.right = st.right.xor(&self.keyed_stream(subkey, &st.left)?)?;
                next.right_done = true;
            }
            (SchemeKind::Bear, 2) | (SchemeKind::Bear2, 3) | (SchemeKind::Lioness, 4) => {
                next.left = st.left.xor(&self.keyed_hash(subkey, &st.right)?)?;
                next.left_done = true;
            }
            (SchemeKind::Lion | SchemeKind::Lion2 | SchemeKind::Lioness, 1) => {
                next.right = st.right.xor(&self.keyed_stream(subkey, &st.left)?)?;
                if self.scheme == SchemeKind::Lion {
                    next.left = st.left.xor(&self.hash(&next.right)?)?;
                    next.left_done = true;
                }
            }
            (SchemeKind::Lion, 2) | (SchemeKind::Lion2, 3) | (SchemeKind::Lioness, 3) => {
                next.right = st.right.xor(&self.keyed_stream(subkey, &st.left)?)?;
                next.right_done = true;
            }
            (SchemeKind::Lion2, 2) | (SchemeKind::Lioness, 2) => {
                next.left = st.left.xor(&self.keyed_hash(subkey, &st.right)?)?;
                next.left_done = self.scheme == SchemeKind::Lion2;
            }
            _ => {
                return Err(Error::Precondition(format!(
                    "{} has no stage {j}",
                    self.scheme
                )))
            }
        }
        Ok(next)
    }

    /// True when `key` maps every plaintext in `pairs` to its ciphertext.
    pub fn is_consistent<'a>(
        &self,
        key: &KeyMaterial,
        pairs: impl IntoIterator<Item = (&'a Block, &'a Block)>,
    ) -> Result<bool> {
        for (pt, ct) in pairs {
            if self.encrypt(key, pt)? != *ct {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
