//! Arbitrary-length bit vectors over GF(2).
//!
//! Bit `i` lives in byte `i / 8` at position `i % 8`, counting from the
//! least-significant bit. Integers are mapped little-endian, so bit 0 of a
//! `BitStr` built with [`BitStr::from_uint`] is the low bit of the integer.
//! Unused high bits of the last byte are always zero; every constructor
//! and operation maintains this.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

type Bytes = SmallVec<[u8; 24]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitStr {
    bytes: Bytes,
    len: usize,
}

#[inline]
fn byte_len(bits: usize) -> usize {
    bits.div_ceil(8)
}

#[inline]
fn tail_mask(bits: usize) -> u8 {
    match bits % 8 {
        0 => 0xff,
        r => (1u8 << r) - 1,
    }
}

impl BitStr {
    /// The empty bitstring.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        BitStr {
            bytes: smallvec::smallvec![0; byte_len(len)],
            len,
        }
    }

    /// Parses the serialized form: exactly `ceil(len / 8)` bytes with the
    /// unused high bits of the last byte cleared.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != byte_len(len) {
            return Err(Error::dimension("BitStr::from_bytes", byte_len(len) * 8, bytes.len() * 8));
        }
        if let Some(&last) = bytes.last() {
            if last & !tail_mask(len) != 0 {
                return Err(Error::Parse(format!(
                    "padding bits of a {len}-bit string are not zero"
                )));
            }
        }
        Ok(BitStr {
            bytes: Bytes::from_slice(bytes),
            len,
        })
    }

    /// Wraps whole bytes; the length is `8 * bytes.len()`.
    pub fn from_byte_vec(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        BitStr {
            bytes: Bytes::from_vec(bytes),
            len,
        }
    }

    /// Low `len` bits of `value`, little-endian. Higher bits of `value` are
    /// discarded.
    ///
    /// Panics if `len > 64`.
    pub fn from_uint(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_uint supports at most 64 bits, got {len}");
        let value = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        let bytes = value.to_le_bytes();
        BitStr {
            bytes: Bytes::from_slice(&bytes[..byte_len(len)]),
            len,
        }
    }

    /// Integer value of the bitstring, or `None` when it is longer than 64 bits.
    pub fn to_uint(&self) -> Option<u64> {
        if self.len > 64 {
            return None;
        }
        let mut buf = [0u8; 8];
        buf[..self.bytes.len()].copy_from_slice(&self.bytes);
        Some(u64::from_le_bytes(buf))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Serialized form, `ceil(len / 8)` bytes.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.bytes.to_vec()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes.into_vec()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn from_hex(s: &str, len: usize) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::Parse(format!("bad hex {s:?}: {e}")))?;
        Self::from_bytes(&bytes, len)
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.bytes[i / 8] >> (i % 8)) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u8 << (i % 8);
        if value {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn is_zero(&self) -> bool {
        self.bytes.iter().all(|&b| b == 0)
    }

    /// Bitwise sum over GF(2). Both operands must have the same length.
    pub fn xor(&self, other: &BitStr) -> Result<BitStr> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitStr) -> Result<()> {
        if self.len != other.len {
            return Err(Error::dimension("xor", self.len, other.len));
        }
        for (a, b) in self.bytes.iter_mut().zip(other.bytes.iter()) {
            *a ^= b;
        }
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitStr) -> BitStr {
        let total = self.len + other.len;
        let mut bytes = Bytes::with_capacity(byte_len(total));
        bytes.extend_from_slice(&self.bytes);
        let shift = self.len % 8;
        if shift == 0 {
            bytes.extend_from_slice(&other.bytes);
        } else {
            for &b in other.bytes.iter() {
                if let Some(last) = bytes.last_mut() {
                    *last |= b << shift;
                }
                bytes.push(b >> (8 - shift));
            }
            bytes.truncate(byte_len(total));
        }
        BitStr { bytes, len: total }
    }

    /// Bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<BitStr> {
        if start > end || end > self.len {
            return Err(Error::Precondition(format!(
                "slice {start}..{end} out of range for a {}-bit string",
                self.len
            )));
        }
        let len = end - start;
        let n = byte_len(len);
        let first = start / 8;
        let shift = start % 8;
        let mut bytes: Bytes = if shift == 0 {
            Bytes::from_slice(&self.bytes[first..first + n])
        } else {
            (0..n)
                .map(|i| {
                    let lo = self.bytes[first + i] >> shift;
                    let hi = self.bytes.get(first + i + 1).map_or(0, |&b| b << (8 - shift));
                    lo | hi
                })
                .collect()
        };
        if let Some(last) = bytes.last_mut() {
            *last &= tail_mask(len);
        }
        Ok(BitStr { bytes, len })
    }

    /// First `n` bits.
    pub fn prefix(&self, n: usize) -> Result<BitStr> {
        self.slice(0, n)
    }

    /// Splits into the first `left` bits and the remainder. Requires a
    /// nonempty remainder (`len > left`).
    pub fn split(&self, left: usize) -> Result<(BitStr, BitStr)> {
        if self.len <= left {
            return Err(Error::Precondition(format!(
                "cannot split a {}-bit string at {left}: the right part would be empty",
                self.len
            )));
        }
        Ok((self.slice(0, left)?, self.slice(left, self.len)?))
    }
}

impl fmt::Debug for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitStr[{}](", self.len)?;
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: u64, n: usize) -> BitStr {
        BitStr::from_uint(v, n)
    }

    #[test]
    fn xor_truth_table() {
        assert_eq!(b(0b1010, 4).xor(&b(0b1010, 4)).unwrap(), b(0, 4));
        assert_eq!(b(0b1010, 4).xor(&b(0, 4)).unwrap(), b(0b1010, 4));
        assert_eq!(b(0b1100, 4).xor(&b(0b1010, 4)).unwrap(), b(0b0110, 4));
    }

    #[test]
    fn xor_length_mismatch() {
        let err = b(1, 4).xor(&b(1, 5)).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 4, actual: 5, .. }));
    }

    #[test]
    fn xor_laws_exhaustive_small() {
        for n in 0..=4usize {
            let max = 1u64 << n;
            for x in 0..max {
                for y in 0..max {
                    let (a, c) = (b(x, n), b(y, n));
                    assert_eq!(a.xor(&c).unwrap(), c.xor(&a).unwrap());
                    assert_eq!(a.xor(&c).unwrap().xor(&c).unwrap(), a);
                    assert!(a.xor(&a).unwrap().is_zero());
                    for z in 0..max {
                        let d = b(z, n);
                        assert_eq!(
                            a.xor(&c).unwrap().xor(&d).unwrap(),
                            a.xor(&c.xor(&d).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn xor_laws_length_8_pairs() {
        for x in 0..256u64 {
            for y in 0..256u64 {
                let (a, c) = (b(x, 8), b(y, 8));
                assert_eq!(a.xor(&c).unwrap().to_uint(), Some(x ^ y));
            }
        }
    }

    #[test]
    fn split_follows_bit_order() {
        let (lo, hi) = b(0b110100, 6).split(2).unwrap();
        assert_eq!(lo, b(0b00, 2));
        assert_eq!(hi, b(0b1101, 4));
        let (z0, z1) = BitStr::zeros(8).split(4).unwrap();
        assert_eq!((z0, z1), (BitStr::zeros(4), BitStr::zeros(4)));
    }

    #[test]
    fn split_requires_nonempty_right() {
        assert!(b(3, 4).split(4).is_err());
        assert!(b(3, 4).split(5).is_err());
        assert!(b(3, 4).split(3).is_ok());
    }

    #[test]
    fn uint_roundtrip_edges() {
        assert_eq!(b(u64::MAX, 64).to_uint(), Some(u64::MAX));
        assert_eq!(b(0xff, 4).to_uint(), Some(0xf));
        assert_eq!(BitStr::zeros(65).to_uint(), None);
        assert_eq!(BitStr::new().to_uint(), Some(0));
    }

    #[test]
    fn from_bytes_rejects_dirty_padding() {
        assert!(BitStr::from_bytes(&[0x10], 4).is_err());
        assert!(BitStr::from_bytes(&[0x0f], 4).is_ok());
        assert!(BitStr::from_bytes(&[0x0f, 0], 4).is_err());
    }

    #[test]
    fn serialization_roundtrip_exhaustive_lengths() {
        for n in 0..=64usize {
            for v in [0u64, 1, 0x5555_5555_5555_5555, 0xdead_beef_cafe_f00d, u64::MAX] {
                let x = b(v, n);
                assert_eq!(x.as_bytes().len(), n.div_ceil(8));
                assert_eq!(BitStr::from_bytes(x.as_bytes(), n).unwrap(), x);
            }
        }
    }

    fn arb_bitstr(max: usize) -> impl Strategy<Value = BitStr> {
        (0..=max).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n).prop_map(|bits| {
                let mut s = BitStr::zeros(bits.len());
                for (i, bit) in bits.into_iter().enumerate() {
                    s.set_bit(i, bit);
                }
                s
            })
        })
    }

    proptest! {
        #[test]
        fn concat_then_split_is_identity(a in arb_bitstr(300), c in arb_bitstr(300)) {
            let joined = a.concat(&c);
            prop_assert_eq!(joined.len(), a.len() + c.len());
            for (i, bit) in a.bits().chain(c.bits()).enumerate() {
                prop_assert_eq!(joined.bit(i), bit);
            }
            if !c.is_empty() {
                let (x, y) = joined.split(a.len()).unwrap();
                prop_assert_eq!(x, a);
                prop_assert_eq!(y, c);
            }
        }

        #[test]
        fn bytes_roundtrip(a in arb_bitstr(1000)) {
            prop_assert_eq!(BitStr::from_bytes(a.as_bytes(), a.len()).unwrap(), a.clone());
            prop_assert_eq!(BitStr::from_hex(&a.to_hex(), a.len()).unwrap(), a);
        }

        #[test]
        fn uint_roundtrip(v in any::<u64>(), n in 0usize..=64) {
            let masked = if n == 64 { v } else { v & ((1u64 << n) - 1) };
            prop_assert_eq!(BitStr::from_uint(v, n).to_uint(), Some(masked));
        }

        #[test]
        fn xor_is_self_inverse(v in any::<u64>(), w in any::<u64>(), n in 0usize..=64) {
            let (a, c) = (BitStr::from_uint(v, n), BitStr::from_uint(w, n));
            prop_assert_eq!(a.xor(&c).unwrap().xor(&c).unwrap(), a);
        }
    }
}
