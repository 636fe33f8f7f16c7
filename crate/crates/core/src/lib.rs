//! Wide-block ciphers built from one stream cipher and one hash function.

pub mod analysis;
pub mod bits;
pub mod cipher;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod params;
pub mod primitives;
pub mod reductions;
pub mod rng;

pub use bits::BitStr;
pub use cipher::{KeyAction, ModularAddition, Translation, WideBlockCipher};
pub use error::{Error, Result};
pub use params::{Block, KeyMaterial, Params, SchemeKind};
