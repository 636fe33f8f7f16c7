//! Scheme dimensions, blocks and key tuples.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use smallvec::SmallVec;

use crate::bits::BitStr;
use crate::error::{Error, Result};
use crate::rng::random_bits;

/// Bit lengths of a wide block: `l` for the left half, `r` for the right
/// half, and `k` for keyed-hash subkeys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub l: usize,
    pub r: usize,
    pub k: usize,
}

impl Params {
    pub fn new(l: usize, r: usize, k: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParams("l must be at least 1".into()));
        }
        if r <= l {
            return Err(Error::InvalidParams(format!("need r > l, got l={l}, r={r}")));
        }
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        Ok(Params { l, r, k })
    }

    /// Checks the per-scheme constraint: the BEAR family needs `k > l`.
    pub fn validate_for(&self, scheme: SchemeKind) -> Result<()> {
        Params::new(self.l, self.r, self.k)?;
        if matches!(scheme, SchemeKind::Bear | SchemeKind::Bear2) && self.k <= self.l {
            return Err(Error::InvalidParams(format!(
                "{scheme} needs k > l, got k={}, l={}",
                self.k, self.l
            )));
        }
        Ok(())
    }

    pub fn block_len(&self) -> usize {
        self.l + self.r
    }
}

pub type SubkeyLengths = SmallVec<[usize; 4]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Bear,
    Lion,
    Lioness,
    Bear2,
    Lion2,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Bear,
        SchemeKind::Lion,
        SchemeKind::Lioness,
        SchemeKind::Bear2,
        SchemeKind::Lion2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Bear => "BEAR",
            SchemeKind::Lion => "LION",
            SchemeKind::Lioness => "LIONESS",
            SchemeKind::Bear2 => "BEAR2",
            SchemeKind::Lion2 => "LION2",
        }
    }

    /// One-byte identifier used in file headers.
    pub fn id(self) -> u8 {
        match self {
            SchemeKind::Bear => 1,
            SchemeKind::Lion => 2,
            SchemeKind::Lioness => 3,
            SchemeKind::Bear2 => 4,
            SchemeKind::Lion2 => 5,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        SchemeKind::ALL.into_iter().find(|s| s.id() == id)
    }

    /// Subkey bit lengths in key order.
    pub fn subkey_lengths(self, params: &Params) -> SubkeyLengths {
        let Params { l, k, .. } = *params;
        let lengths: &[usize] = match self {
            SchemeKind::Bear => &[k, k],
            SchemeKind::Lion => &[l, l],
            SchemeKind::Lioness => &[l, k, l, k],
            SchemeKind::Bear2 => &[k, l, k],
            SchemeKind::Lion2 => &[l, k, l],
        };
        SubkeyLengths::from_slice(lengths)
    }

    pub fn key_bits(self, params: &Params) -> usize {
        self.subkey_lengths(params).iter().sum()
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown scheme {s:?}")))
    }
}

/// A plaintext or ciphertext `(L, R)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub left: BitStr,
    pub right: BitStr,
}

impl Block {
    pub fn new(left: BitStr, right: BitStr) -> Self {
        Block { left, right }
    }

    /// Splits a whole message into its `l`-bit left and remaining right half.
    pub fn from_message(message: &BitStr, l: usize) -> Result<Self> {
        let (left, right) = message.split(l)?;
        Ok(Block { left, right })
    }

    pub fn to_message(&self) -> BitStr {
        self.left.concat(&self.right)
    }

    pub fn random<R: RngCore + ?Sized>(params: &Params, rng: &mut R) -> Self {
        Block {
            left: random_bits(params.l, rng),
            right: random_bits(params.r, rng),
        }
    }

    pub fn check(&self, params: &Params) -> Result<()> {
        if self.left.len() != params.l {
            return Err(Error::dimension("block left half", params.l, self.left.len()));
        }
        if self.right.len() != params.r {
            return Err(Error::dimension("block right half", params.r, self.right.len()));
        }
        Ok(())
    }
}

/// A per-scheme subkey tuple, `(K1, K2, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyMaterial {
    scheme: SchemeKind,
    subkeys: SmallVec<[BitStr; 4]>,
}

impl KeyMaterial {
    pub fn new(scheme: SchemeKind, params: &Params, subkeys: Vec<BitStr>) -> Result<Self> {
        let lengths = scheme.subkey_lengths(params);
        if subkeys.len() != lengths.len() {
            return Err(Error::InvalidKey {
                scheme: scheme.name(),
                reason: format!("expected {} subkeys, got {}", lengths.len(), subkeys.len()),
            });
        }
        for (i, (key, &want)) in subkeys.iter().zip(&lengths).enumerate() {
            if key.len() != want {
                return Err(Error::InvalidKey {
                    scheme: scheme.name(),
                    reason: format!("K{} must be {want} bits, got {}", i + 1, key.len()),
                });
            }
        }
        Ok(KeyMaterial {
            scheme,
            subkeys: SmallVec::from_vec(subkeys),
        })
    }

    /// Builds from subkeys already known to have the scheme's lengths.
    pub(crate) fn from_parts(scheme: SchemeKind, subkeys: SmallVec<[BitStr; 4]>) -> Self {
        KeyMaterial { scheme, subkeys }
    }

    pub fn random<R: RngCore + ?Sized>(scheme: SchemeKind, params: &Params, rng: &mut R) -> Self {
        let subkeys = scheme
            .subkey_lengths(params)
            .into_iter()
            .map(|n| random_bits(n, rng))
            .collect();
        KeyMaterial { scheme, subkeys }
    }

    /// Splits the concatenation `K1 ‖ K2 ‖ ...` back into subkeys.
    pub fn from_concatenated(scheme: SchemeKind, params: &Params, bits: &BitStr) -> Result<Self> {
        let lengths = scheme.subkey_lengths(params);
        let total: usize = lengths.iter().sum();
        if bits.len() != total {
            return Err(Error::InvalidKey {
                scheme: scheme.name(),
                reason: format!("expected {total} key bits, got {}", bits.len()),
            });
        }
        let mut offset = 0;
        let mut subkeys = SmallVec::new();
        for n in lengths {
            subkeys.push(bits.slice(offset, offset + n)?);
            offset += n;
        }
        Ok(KeyMaterial { scheme, subkeys })
    }

    pub fn concatenated(&self) -> BitStr {
        self.subkeys
            .iter()
            .fold(BitStr::new(), |acc, k| acc.concat(k))
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn subkeys(&self) -> &[BitStr] {
        &self.subkeys
    }

    /// Subkey `K_i`, 1-based as in the round tables.
    pub fn k(&self, i: usize) -> &BitStr {
        &self.subkeys[i - 1]
    }

    pub fn check(&self, scheme: SchemeKind, params: &Params) -> Result<()> {
        if self.scheme != scheme {
            return Err(Error::InvalidKey {
                scheme: scheme.name(),
                reason: format!("key was built for {}", self.scheme),
            });
        }
        let lengths = scheme.subkey_lengths(params);
        let lengths_match = self.subkeys.len() == lengths.len()
            && self.subkeys.iter().zip(&lengths).all(|(k, &n)| k.len() == n);
        if !lengths_match {
            return Err(Error::InvalidKey {
                scheme: scheme.name(),
                reason: format!("subkey lengths must be {lengths:?}"),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn toy() -> Params {
        Params::new(4, 8, 5).unwrap()
    }

    #[test]
    fn params_require_r_greater_than_l() {
        assert!(Params::new(4, 4, 5).is_err());
        assert!(Params::new(0, 8, 5).is_err());
        assert!(Params::new(4, 5, 1).is_ok());
    }

    #[test]
    fn bear_family_requires_k_above_l() {
        let p = Params::new(4, 8, 4).unwrap();
        assert!(p.validate_for(SchemeKind::Bear).is_err());
        assert!(p.validate_for(SchemeKind::Bear2).is_err());
        assert!(p.validate_for(SchemeKind::Lion).is_ok());
        assert!(toy().validate_for(SchemeKind::Bear).is_ok());
    }

    #[test]
    fn key_bit_totals_at_toy_scale() {
        let p = toy();
        let bits: Vec<_> = SchemeKind::ALL.iter().map(|s| s.key_bits(&p)).collect();
        assert_eq!(bits, vec![10, 8, 18, 14, 13]);
    }

    #[test]
    fn scheme_ids_roundtrip() {
        for s in SchemeKind::ALL {
            assert_eq!(SchemeKind::from_id(s.id()), Some(s));
            assert_eq!(s.name().to_lowercase().parse::<SchemeKind>().unwrap(), s);
        }
        assert_eq!(SchemeKind::from_id(0), None);
        assert_eq!(SchemeKind::from_id(6), None);
    }

    #[test]
    fn key_concatenation_roundtrip() {
        let p = toy();
        let mut rng = seeded(1);
        for s in SchemeKind::ALL {
            let key = KeyMaterial::random(s, &p, &mut rng);
            let back = KeyMaterial::from_concatenated(s, &p, &key.concatenated()).unwrap();
            assert_eq!(back, key);
        }
    }

    #[test]
    fn key_lengths_are_validated() {
        let p = toy();
        let bad = KeyMaterial::new(SchemeKind::Lion, &p, vec![BitStr::zeros(4), BitStr::zeros(5)]);
        assert!(matches!(bad, Err(Error::InvalidKey { .. })));
        let short = KeyMaterial::new(SchemeKind::Bear, &p, vec![BitStr::zeros(5)]);
        assert!(short.is_err());
    }

    #[test]
    fn block_from_message() {
        let m = BitStr::from_uint(0xabc, 12);
        let b = Block::from_message(&m, 4).unwrap();
        assert_eq!(b.left.to_uint(), Some(0xc));
        assert_eq!(b.right.to_uint(), Some(0xab));
        assert_eq!(b.to_message(), m);
        assert!(b.check(&toy()).is_ok());
    }
}
