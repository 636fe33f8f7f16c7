//! The single-block file format.
//!
//! A file is a 10-byte header followed by the ciphertext of the whole input
//! as one wide block:
//!
//! | bytes | content |
//! |-------|---------|
//! | 0..4  | `LBLK` |
//! | 4     | version, `1` |
//! | 5     | scheme id, 1 = BEAR ... 5 = LION2 |
//! | 6..10 | left-half length in bits, big-endian, `256` |
//!
//! Version 1 uses the SHA-256 primitives with a 256-bit left half and
//! 512-bit hash keys. Key files hold the raw concatenation `K1 ‖ K2 ‖ ...`.

use bearlion_core::primitives::Primitives;
use bearlion_core::{BitStr, Block, KeyMaterial, Params, SchemeKind, WideBlockCipher};

use crate::error::CliError;

pub const MAGIC: [u8; 4] = *b"LBLK";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
pub const LEFT_BITS: usize = 256;
pub const HASH_KEY_BITS: usize = 512;
/// Inputs must be longer than this so that `r > l`.
pub const MIN_EXCLUSIVE_BYTES: usize = 2 * LEFT_BITS / 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FileHeader {
    pub scheme: SchemeKind,
    pub l_bits: u32,
}

impl FileHeader {
    pub fn new(scheme: SchemeKind) -> Self {
        FileHeader {
            scheme,
            l_bits: LEFT_BITS as u32,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5] = self.scheme.id();
        out[6..].copy_from_slice(&self.l_bits.to_be_bytes());
        out
    }

    /// Splits `data` into its header and body.
    pub fn parse(data: &[u8]) -> Result<(FileHeader, &[u8]), CliError> {
        if data.len() < HEADER_LEN {
            return Err(CliError::Format(format!(
                "file has {} bytes, shorter than the {HEADER_LEN}-byte header",
                data.len()
            )));
        }
        if data[..4] != MAGIC {
            return Err(CliError::Format("missing LBLK magic".into()));
        }
        if data[4] != VERSION {
            return Err(CliError::Format(format!("unsupported version {}", data[4])));
        }
        let scheme = SchemeKind::from_id(data[5])
            .ok_or_else(|| CliError::Format(format!("unknown scheme id {}", data[5])))?;
        let l_bits = u32::from_be_bytes(data[6..10].try_into().expect("four bytes"));
        if l_bits as usize != LEFT_BITS {
            return Err(CliError::Format(format!(
                "version 1 requires a {LEFT_BITS}-bit left half, header says {l_bits}"
            )));
        }
        Ok((FileHeader { scheme, l_bits }, &data[HEADER_LEN..]))
    }
}

/// Production dimensions for a message of `len` bytes.
pub fn params_for(len: usize) -> Result<Params, CliError> {
    if len <= MIN_EXCLUSIVE_BYTES {
        return Err(CliError::Core(bearlion_core::Error::InvalidParams(format!(
            "message of {len} bytes is too short: need more than {MIN_EXCLUSIVE_BYTES} bytes so the right half exceeds {LEFT_BITS} bits"
        ))));
    }
    Ok(Params::new(LEFT_BITS, len * 8 - LEFT_BITS, HASH_KEY_BITS)?)
}

/// Required key file size for `scheme`, in bytes.
pub fn key_file_len(scheme: SchemeKind) -> usize {
    let params = Params {
        l: LEFT_BITS,
        r: LEFT_BITS + 8,
        k: HASH_KEY_BITS,
    };
    scheme.key_bits(&params) / 8
}

fn cipher_and_key(scheme: SchemeKind, key: &[u8], len: usize) -> Result<(WideBlockCipher, KeyMaterial), CliError> {
    if key.len() != key_file_len(scheme) {
        return Err(CliError::Core(bearlion_core::Error::InvalidKey {
            scheme: scheme.name(),
            reason: format!("key file must be {} bytes, got {}", key_file_len(scheme), key.len()),
        }));
    }
    let params = params_for(len)?;
    let cipher = WideBlockCipher::new(scheme, params, Primitives::production(&params)?)?;
    let key = KeyMaterial::from_concatenated(scheme, &params, &BitStr::from_bytes(key, key.len() * 8)?)?;
    Ok((cipher, key))
}

pub fn encrypt_bytes(scheme: SchemeKind, key: &[u8], plaintext: &[u8]) -> Result<Vec<u8>, CliError> {
    let (cipher, key) = cipher_and_key(scheme, key, plaintext.len())?;
    let block = Block::from_message(&BitStr::from_bytes(plaintext, plaintext.len() * 8)?, LEFT_BITS)?;
    let ct = cipher.encrypt(&key, &block)?;
    let mut out = Vec::with_capacity(HEADER_LEN + plaintext.len());
    out.extend_from_slice(&FileHeader::new(scheme).to_bytes());
    out.extend_from_slice(&ct.to_message().into_bytes());
    Ok(out)
}

/// Decrypts a container. When `expected` is given the header must name it.
pub fn decrypt_bytes(expected: Option<SchemeKind>, key: &[u8], data: &[u8]) -> Result<Vec<u8>, CliError> {
    let (header, body) = FileHeader::parse(data)?;
    if let Some(want) = expected {
        if want != header.scheme {
            return Err(CliError::Format(format!(
                "file was written with {}, not {want}",
                header.scheme
            )));
        }
    }
    let (cipher, key) = cipher_and_key(header.scheme, key, body.len())?;
    let block = Block::from_message(&BitStr::from_bytes(body, body.len() * 8)?, LEFT_BITS)?;
    Ok(cipher.decrypt(&key, &block)?.to_message().into_bytes())
}
