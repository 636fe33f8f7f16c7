//! Known-plaintext key-recovery oracles.
//!
//! [`BruteForceOracle`] is the concrete stand-in for a key-recovery
//! adversary: it tries every key of a toy-scale scheme against the supplied
//! pairs. Keys are visited in lexicographic order of the tuple
//! `(K1, K2, ...)`, each subkey compared by its integer value, so the first
//! consistent key is well defined and independent of how the search is
//! split across threads.
//!
//! Every scheme consumes its subkeys in round order, so the default search
//! walks the key tree depth-first: the rounds that depend on `K1..Kj` are
//! evaluated once per prefix, and a prefix is abandoned as soon as a finished
//! ciphertext half disagrees for some pair. The verdict on each key is the
//! same as evaluating it in full; [`SearchStrategy::PerKey`] does exactly
//! that and serves as the reference.

use rand::RngCore;
use rayon::prelude::*;

use crate::bits::BitStr;
use crate::cipher::{RoundState, WideBlockCipher};
use crate::error::{Error, Result};
use crate::metrics;
use crate::params::{Block, KeyMaterial, Params, SchemeKind, SubkeyLengths};

pub const DEFAULT_KEY_CAP_BITS: u32 = 24;

/// Known plaintext/ciphertext pairs, at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    pairs: Vec<(Block, Block)>,
}

impl PairSet {
    pub fn new(pairs: Vec<(Block, Block)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Precondition("a pair set needs at least one pair".into()));
        }
        Ok(PairSet { pairs })
    }

    pub fn check(&self, params: &Params) -> Result<()> {
        for (pt, ct) in &self.pairs {
            pt.check(params)?;
            ct.check(params)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Block, Block)] {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Block, &Block)> {
        self.pairs.iter().map(|(p, c)| (p, c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleMode {
    /// Stop at the lexicographically first consistent key.
    FirstConsistent,
    /// Return every consistent key.
    AllConsistent,
}

impl OracleMode {
    pub fn name(self) -> &'static str {
        match self {
            OracleMode::FirstConsistent => "first-consistent",
            OracleMode::AllConsistent => "all-consistent",
        }
    }
}

impl std::str::FromStr for OracleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-consistent" | "first" => Ok(OracleMode::FirstConsistent),
            "all-consistent" | "all" => Ok(OracleMode::AllConsistent),
            _ => Err(Error::Parse(format!("unknown oracle mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub mode: OracleMode,
    /// Consistent keys in enumeration order.
    pub keys: Vec<KeyMaterial>,
    /// Keys the oracle tried before answering.
    pub keys_scanned: u64,
}

/// An adversary that recovers cipher keys from known pairs.
pub trait KeyRecoveryOracle: Send + Sync {
    fn recover(&self, pairs: &PairSet) -> Result<OracleAnswer>;
}

impl<F> KeyRecoveryOracle for F
where
    F: Fn(&PairSet) -> Result<OracleAnswer> + Send + Sync,
{
    fn recover(&self, pairs: &PairSet) -> Result<OracleAnswer> {
        self(pairs)
    }
}

/// Indexing of a scheme's full key space.
#[derive(Debug, Clone)]
pub struct KeySpace {
    scheme: SchemeKind,
    params: Params,
    lengths: SubkeyLengths,
    bits: u32,
}

impl KeySpace {
    pub fn new(scheme: SchemeKind, params: &Params) -> Self {
        let lengths = scheme.subkey_lengths(params);
        let bits = lengths.iter().sum::<usize>() as u32;
        KeySpace {
            scheme,
            params: *params,
            lengths,
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Fails with the size of the search when the space exceeds `2^cap_bits`.
    pub fn ensure_within(&self, cap_bits: u32) -> Result<()> {
        if self.bits > cap_bits || self.bits >= 64 {
            return Err(Error::KeySpaceTooLarge {
                bits: self.bits,
                cap_bits,
                estimate: 1u128.checked_shl(self.bits).unwrap_or(u128::MAX),
            });
        }
        Ok(())
    }

    /// Number of keys; only meaningful once [`ensure_within`](Self::ensure_within) passed.
    pub fn size(&self) -> u64 {
        1u64 << self.bits
    }

    /// The key at position `index` in lexicographic order. `K1` occupies the
    /// most significant bits of the index.
    pub fn key_at(&self, index: u64) -> KeyMaterial {
        metrics::count_keys_enumerated(1);
        self.decode(index)
    }

    fn decode(&self, index: u64) -> KeyMaterial {
        let mut shift = self.bits as usize;
        let subkeys = self
            .lengths
            .iter()
            .map(|&n| {
                shift -= n;
                BitStr::from_uint(index >> shift, n)
            })
            .collect();
        KeyMaterial::from_parts(self.scheme, subkeys)
    }

    pub fn index_of(&self, key: &KeyMaterial) -> Option<u64> {
        if key.check(self.scheme, &self.params).is_err() || self.bits >= 64 {
            return None;
        }
        key.subkeys()
            .iter()
            .try_fold(0u64, |acc, k| Some((acc << k.len()) | k.to_uint()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Depth-first over subkeys, sharing rounds between keys with a common prefix.
    #[default]
    Staged,
    /// Encrypts every pair under every key independently.
    PerKey,
}

/// Exhaustive key search over a toy-scale scheme.
#[derive(Debug, Clone)]
pub struct BruteForceOracle {
    cipher: WideBlockCipher,
    mode: OracleMode,
    cap_bits: u32,
    parallel: bool,
    strategy: SearchStrategy,
}

impl BruteForceOracle {
    pub fn new(cipher: WideBlockCipher, mode: OracleMode) -> Self {
        BruteForceOracle {
            cipher,
            mode,
            cap_bits: DEFAULT_KEY_CAP_BITS,
            parallel: true,
            strategy: SearchStrategy::Staged,
        }
    }

    pub fn with_strategy(mut self, strategy: SearchStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_cap_bits(mut self, cap_bits: u32) -> Self {
        self.cap_bits = cap_bits;
        self
    }

    /// Toggles splitting the search across the rayon pool. Answers do not
    /// depend on this setting.
    pub fn with_parallelism(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    pub fn key_space(&self) -> KeySpace {
        KeySpace::new(self.cipher.scheme(), self.cipher.params())
    }

    fn test_key(&self, space: &KeySpace, pairs: &PairSet, index: u64) -> Result<Option<KeyMaterial>> {
        let key = space.key_at(index);
        Ok(self.cipher.is_consistent(&key, pairs.iter())?.then_some(key))
    }
}

impl BruteForceOracle {
    fn recover_per_key(&self, space: &KeySpace, pairs: &PairSet) -> Result<(Vec<KeyMaterial>, u64)> {
        let size = space.size();
        let indices = 0..size as usize;
        let probe = |i: usize| {
            let i = i as u64;
            self.test_key(space, pairs, i).transpose().map(|r| (i, r))
        };
        Ok(match (self.mode, self.parallel) {
            (OracleMode::FirstConsistent, false) => match indices.clone().find_map(probe) {
                Some((i, key)) => (vec![key?], i + 1),
                None => (Vec::new(), size),
            },
            (OracleMode::FirstConsistent, true) => {
                match indices.clone().into_par_iter().with_min_len(1 << 10).find_map_first(probe) {
                    Some((i, key)) => (vec![key?], i + 1),
                    None => (Vec::new(), size),
                }
            }
            (OracleMode::AllConsistent, false) => {
                let keys = indices.clone().filter_map(probe).map(|(_, k)| k).collect::<Result<_>>()?;
                (keys, size)
            }
            (OracleMode::AllConsistent, true) => {
                let keys = indices
                    .into_par_iter()
                    .with_min_len(1 << 10)
                    .filter_map(probe)
                    .map(|(_, k)| k)
                    .collect::<Result<_>>()?;
                (keys, size)
            }
        })
    }

    fn recover_staged(&self, space: &KeySpace, pairs: &PairSet) -> Result<(Vec<KeyMaterial>, u64)> {
        let starts = pairs
            .iter()
            .map(|(pt, _)| self.cipher.begin(pt))
            .collect::<Result<Vec<_>>>()?;
        let search = StagedSearch {
            cipher: &self.cipher,
            lengths: &space.lengths,
            targets: pairs.pairs().iter().map(|(_, ct)| ct).collect(),
            first_only: self.mode == OracleMode::FirstConsistent,
        };
        let first_len = space.lengths[0];
        let branch = |v: u64| -> Result<Vec<u64>> {
            let mut found = Vec::new();
            search.descend(0, 0, v, &starts, &mut found)?;
            Ok(found)
        };
        // Branches on K1 are independent, so they can run in parallel while
        // the lexicographic order of the answer is kept.
        let indices: Vec<u64> = match (self.mode, self.parallel) {
            (OracleMode::FirstConsistent, false) => (0..1u64 << first_len)
                .map(branch)
                .find(|r| r.as_ref().map_or(true, |f| !f.is_empty()))
                .transpose()?
                .unwrap_or_default(),
            (OracleMode::FirstConsistent, true) => (0..1u64 << first_len)
                .into_par_iter()
                .map(branch)
                .find_first(|r| r.as_ref().map_or(true, |f| !f.is_empty()))
                .transpose()?
                .unwrap_or_default(),
            (OracleMode::AllConsistent, false) => {
                let parts = (0..1u64 << first_len).map(branch).collect::<Result<Vec<_>>>()?;
                parts.concat()
            }
            (OracleMode::AllConsistent, true) => {
                let parts = (0..1u64 << first_len)
                    .into_par_iter()
                    .map(branch)
                    .collect::<Result<Vec<_>>>()?;
                parts.concat()
            }
        };
        let scanned = match (self.mode, indices.first()) {
            (OracleMode::FirstConsistent, Some(&i)) => i + 1,
            _ => space.size(),
        };
        Ok((indices.into_iter().map(|i| space.decode(i)).collect(), scanned))
    }
}

struct StagedSearch<'a> {
    cipher: &'a WideBlockCipher,
    lengths: &'a [usize],
    targets: Vec<&'a Block>,
    first_only: bool,
}

impl StagedSearch<'_> {
    /// Fixes subkey `depth` to `value` below the key prefix `prefix` and
    /// explores the resulting subtree. Returns true when the search is done.
    fn descend(
        &self,
        depth: usize,
        prefix: u64,
        value: u64,
        states: &[RoundState],
        found: &mut Vec<u64>,
    ) -> Result<bool> {
        let n = self.lengths[depth];
        let index = (prefix << n) | value;
        let subkey = BitStr::from_uint(value, n);
        let rest_bits: usize = self.lengths[depth + 1..].iter().sum();
        let mut next = Vec::with_capacity(states.len());
        for (st, ct) in states.iter().zip(&self.targets) {
            let advanced = self.cipher.advance(depth + 1, &subkey, st)?;
            if !advanced.may_reach(ct) {
                metrics::count_keys_enumerated(1 << rest_bits);
                return Ok(false);
            }
            next.push(advanced);
        }
        if depth + 1 == self.lengths.len() {
            metrics::count_keys_enumerated(1);
            found.push(index);
            return Ok(self.first_only);
        }
        for v in 0..1u64 << self.lengths[depth + 1] {
            if self.descend(depth + 1, index, v, &next, found)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl KeyRecoveryOracle for BruteForceOracle {
    fn recover(&self, pairs: &PairSet) -> Result<OracleAnswer> {
        let space = self.key_space();
        space.ensure_within(self.cap_bits)?;
        pairs.check(self.cipher.params())?;
        let (keys, keys_scanned) = match self.strategy {
            SearchStrategy::Staged => self.recover_staged(&space, pairs)?,
            SearchStrategy::PerKey => self.recover_per_key(&space, pairs)?,
        };
        Ok(OracleAnswer {
            mode: self.mode,
            keys,
            keys_scanned,
        })
    }
}

/// Answers with a fixed key when, and only when, it is consistent with the
/// query. Models a perfect oracle whose key choice is known in advance.
#[derive(Debug, Clone)]
pub struct PlantedKeyOracle {
    cipher: WideBlockCipher,
    key: KeyMaterial,
}

impl PlantedKeyOracle {
    pub fn new(cipher: WideBlockCipher, key: KeyMaterial) -> Self {
        PlantedKeyOracle { cipher, key }
    }
}

impl KeyRecoveryOracle for PlantedKeyOracle {
    fn recover(&self, pairs: &PairSet) -> Result<OracleAnswer> {
        let ok = self.cipher.is_consistent(&self.key, pairs.iter())?;
        Ok(OracleAnswer {
            mode: OracleMode::FirstConsistent,
            keys: if ok { vec![self.key.clone()] } else { Vec::new() },
            keys_scanned: 1,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub n: usize,
    pub mean_consistent_keys: f64,
}

/// For `n = 1..=n_max`, the mean number of keys consistent with `n` random
/// known pairs under a planted random key, over `trials` trials.
pub fn consistent_count_profile<R: RngCore + ?Sized>(
    cipher: &WideBlockCipher,
    n_max: usize,
    trials: usize,
    cap_bits: u32,
    rng: &mut R,
) -> Result<Vec<ProfileRow>> {
    let space = KeySpace::new(cipher.scheme(), cipher.params());
    space.ensure_within(cap_bits)?;
    if trials == 0 || n_max == 0 {
        return Ok(Vec::new());
    }
    let params = *cipher.params();
    let mut totals = vec![0u64; n_max];
    for _ in 0..trials {
        let planted = KeyMaterial::random(cipher.scheme(), &params, rng);
        let pairs = (0..n_max)
            .map(|_| {
                let pt = Block::random(&params, rng);
                let ct = cipher.encrypt(&planted, &pt)?;
                Ok((pt, ct))
            })
            .collect::<Result<Vec<_>>>()?;
        let oracle = BruteForceOracle::new(cipher.clone(), OracleMode::AllConsistent).with_cap_bits(cap_bits);
        for (n, total) in totals.iter_mut().enumerate() {
            let prefix = PairSet::new(pairs[..=n].to_vec())?;
            *total += oracle.recover(&prefix)?.keys.len() as u64;
        }
    }
    Ok(totals
        .into_iter()
        .enumerate()
        .map(|(i, total)| ProfileRow {
            n: i + 1,
            mean_consistent_keys: total as f64 / trials as f64,
        })
        .collect())
}
