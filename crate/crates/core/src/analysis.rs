//! Exhaustive checks of the structural assumptions behind the reductions.
//!
//! Everything here enumerates small domains outright: the image of a stream
//! cipher, the good-pairing property of `(S, H)`, surjectivity of
//! `K -> H_K(R)`, and the two key-recovery equations that serve as baseline
//! solvers for the reductions.

use std::collections::BTreeMap;
use std::fmt;

use rand::RngCore;

use crate::bits::BitStr;
use crate::cipher::KeyAction;
use crate::error::{Error, Result};
use crate::metrics;
use crate::primitives::{KeyedHash, StreamCipher, UnkeyedHash};
use crate::rng::random_bits;

/// Largest seed length whose image is enumerated.
pub const IMAGE_CAP_BITS: usize = 20;
/// Largest `l` for which every `Y` is examined.
pub const PAIRING_CAP_BITS: usize = 16;
/// Largest `r` for which `H` is inverted over all of `F^r`.
pub const EXACT_PREIMAGE_CAP_BITS: usize = 20;
/// Largest key length swept by the surjectivity check and the solvers.
pub const KEY_SWEEP_CAP_BITS: usize = 20;
pub const DEFAULT_SURJECTIVITY_SAMPLES: usize = 100;
pub const DEFAULT_PREIMAGE_SAMPLES: usize = 1 << 16;

fn ensure_cap(bits: usize, cap_bits: usize) -> Result<()> {
    if bits > cap_bits {
        return Err(Error::EnumerationTooLarge { bits, cap_bits });
    }
    Ok(())
}

fn all_values(bits: usize) -> impl Iterator<Item = BitStr> {
    (0..1u64 << bits).map(move |v| BitStr::from_uint(v, bits))
}

/// `Im(S)`, with the seeds that reach each output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamImage {
    seed_len: usize,
    by_output: BTreeMap<BitStr, Vec<BitStr>>,
}

impl StreamImage {
    pub fn len(&self) -> usize {
        self.by_output.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_output.is_empty()
    }

    pub fn seed_len(&self) -> usize {
        self.seed_len
    }

    pub fn contains(&self, x: &BitStr) -> bool {
        self.by_output.contains_key(x)
    }

    /// Seeds `M` with `S(M) = x`, in increasing order.
    pub fn seeds_of(&self, x: &BitStr) -> &[BitStr] {
        self.by_output.get(x).map_or(&[], Vec::as_slice)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &BitStr> {
        self.by_output.keys()
    }
}

pub fn image_of_stream(stream: &dyn StreamCipher) -> Result<StreamImage> {
    let l = stream.seed_len();
    ensure_cap(l, IMAGE_CAP_BITS)?;
    let mut by_output: BTreeMap<BitStr, Vec<BitStr>> = BTreeMap::new();
    for seed in all_values(l) {
        by_output.entry(stream.keystream(&seed)?).or_default().push(seed);
    }
    Ok(StreamImage { seed_len: l, by_output })
}

/// How the `|H^{-1}(Y)|` histogram was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Exact,
    /// Counts are hits among this many uniform samples of `F^r`, not preimage sizes.
    Sampled(usize),
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coverage::Exact => f.write_str("exact"),
            Coverage::Sampled(n) => write!(f, "sampled:{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingProfile {
    pub l: usize,
    pub r: usize,
    /// Number of `Y` with `H^{-1}(Y) ∩ Im(S)` nonempty.
    pub covered: u64,
    pub fraction: f64,
    pub image_size: usize,
    /// `|H^{-1}(Y)|` mapped to the number of `Y` with that many preimages.
    pub histogram: BTreeMap<u64, u64>,
    pub histogram_coverage: Coverage,
}

impl PairingProfile {
    pub fn to_record(&self) -> String {
        let hist: Vec<String> = self.histogram.iter().map(|(s, c)| format!("{s}:{c}")).collect();
        format!(
            "good-pairing\tl={}\tr={}\timage_size={}\tcovered={}\tfraction={}\thistogram={}\thistogram_coverage={}",
            self.l,
            self.r,
            self.image_size,
            self.covered,
            self.fraction,
            hist.join(","),
            self.histogram_coverage
        )
    }
}

/// Measures how often `H^{-1}(Y)` meets `Im(S)` for `Y` ranging over `F^l`.
///
/// The covered set is exactly `H(Im(S))`, so the fraction is always exact.
/// Only the preimage-size histogram falls back to `samples` random inputs
/// when `r` is too large to sweep.
pub fn good_pairing_profile<R: RngCore + ?Sized>(
    stream: &dyn StreamCipher,
    hash: &dyn UnkeyedHash,
    samples: usize,
    rng: &mut R,
) -> Result<PairingProfile> {
    let (l, r) = (hash.output_len(), hash.input_len());
    if stream.output_len() != r || stream.seed_len() != l {
        return Err(Error::Precondition(format!(
            "stream maps F^{} to F^{}, hash maps F^{r} to F^{l}",
            stream.seed_len(),
            stream.output_len()
        )));
    }
    ensure_cap(l, PAIRING_CAP_BITS)?;
    let image = image_of_stream(stream)?;
    let mut hit = vec![false; 1 << l];
    for x in image.outputs() {
        let y = hash.digest(x)?;
        hit[y.to_uint().expect("l is capped") as usize] = true;
    }
    let covered = hit.iter().filter(|&&h| h).count() as u64;

    let mut counts = vec![0u64; 1 << l];
    let coverage = if r <= EXACT_PREIMAGE_CAP_BITS {
        for x in all_values(r) {
            counts[hash.digest(&x)?.to_uint().expect("l is capped") as usize] += 1;
        }
        Coverage::Exact
    } else {
        for _ in 0..samples {
            let x = random_bits(r, rng);
            counts[hash.digest(&x)?.to_uint().expect("l is capped") as usize] += 1;
        }
        Coverage::Sampled(samples)
    };
    let mut histogram = BTreeMap::new();
    for c in counts {
        *histogram.entry(c).or_insert(0) += 1;
    }
    Ok(PairingProfile {
        l,
        r,
        covered,
        fraction: covered as f64 / (1u64 << l) as f64,
        image_size: image.len(),
        histogram,
        histogram_coverage: coverage,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurjectivityReport {
    pub samples: usize,
    pub surjective: usize,
    pub fraction: f64,
}

impl SurjectivityReport {
    pub fn to_record(&self, l: usize, k: usize) -> String {
        format!(
            "surjectivity\tl={l}\tk={k}\tsamples={}\tsurjective={}\tfraction={}",
            self.samples, self.surjective, self.fraction
        )
    }
}

/// Fraction of random `R` for which `K -> H_K(R)` covers all of `F^l`.
pub fn hr_surjectivity<R: RngCore + ?Sized>(
    hash: &dyn KeyedHash,
    samples: usize,
    rng: &mut R,
) -> Result<SurjectivityReport> {
    let (k, l) = (hash.key_len(), hash.output_len());
    ensure_cap(k, KEY_SWEEP_CAP_BITS)?;
    ensure_cap(l, KEY_SWEEP_CAP_BITS)?;
    let mut surjective = 0;
    for _ in 0..samples {
        let msg = random_bits(hash.input_len(), rng);
        let mut seen = vec![false; 1 << l];
        let mut distinct = 0usize;
        for key in all_values(k) {
            let y = hash.digest(&key, &msg)?.to_uint().expect("l is capped") as usize;
            if !seen[y] {
                seen[y] = true;
                distinct += 1;
            }
        }
        if distinct == 1 << l {
            surjective += 1;
        }
    }
    Ok(SurjectivityReport {
        samples,
        surjective,
        fraction: if samples == 0 {
            0.0
        } else {
            surjective as f64 / samples as f64
        },
    })
}

/// Every `K` with `H_K(input) = z`, in increasing order.
pub fn solve_keyed_hash_equation(hash: &dyn KeyedHash, z: &BitStr, input: &BitStr) -> Result<Vec<BitStr>> {
    let k = hash.key_len();
    ensure_cap(k, KEY_SWEEP_CAP_BITS)?;
    let mut out = Vec::new();
    for key in all_values(k) {
        metrics::count_keys_enumerated(1);
        if hash.digest(&key, input)? == *z {
            out.push(key);
        }
    }
    Ok(out)
}

/// Every `K` with `S(τ_K(base)) = z`, in increasing order.
pub fn solve_stream_equation(
    stream: &dyn StreamCipher,
    action: &dyn KeyAction,
    z: &BitStr,
    base: &BitStr,
) -> Result<Vec<BitStr>> {
    let l = stream.seed_len();
    ensure_cap(l, KEY_SWEEP_CAP_BITS)?;
    let mut out = Vec::new();
    for key in all_values(l) {
        metrics::count_keys_enumerated(1);
        if stream.keystream(&action.apply(&key, base)?)? == *z {
            out.push(key);
        }
    }
    Ok(out)
}

pub fn image_record(image: &StreamImage, r: usize) -> String {
    format!("image\tl={}\tr={r}\tsize={}", image.seed_len(), image.len())
}
