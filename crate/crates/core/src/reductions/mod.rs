//! Key-recovery oracles turned into solvers for the underlying primitives.
//!
//! Each reduction fixes the subkeys it is free to choose, builds
//! plaintext/ciphertext pairs that are consistent with some full key whose
//! remaining subkey is the secret it wants, asks the oracle for keys, and
//! checks the target equation on every key returned. Work done while
//! building pairs and checking answers is metered apart from the oracle.
//!
//! Stream targets go through the cipher's key action, so `S(x + K)` becomes
//! `S(τ_K(x))` whenever a non-translation action is installed.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::analysis::StreamImage;
use crate::bits::BitStr;
use crate::cipher::WideBlockCipher;
use crate::error::{Error, Result};
use crate::metrics::{self, Cost};
use crate::oracle::{KeyRecoveryOracle, OracleAnswer, PairSet};
use crate::params::{Block, KeyMaterial, SchemeKind};
use crate::rng::{distinct_random_bits, random_bits};

pub mod harness;

/// Attempts at a fresh `R̃` before the collision search gives up.
pub const DEFAULT_RETRY_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// One LION pair reveals a stream seed.
    LionSeedSingle,
    /// One LION pair yields collisions or preimages of the unkeyed hash.
    LionHashSingle,
    BearHash,
    Bear2Hash,
    Bear2Stream,
    LionStream,
    Lion2Stream,
    Lion2Hash,
    LionessStream,
    LionessHash,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::LionSeedSingle,
        Theorem::LionHashSingle,
        Theorem::BearHash,
        Theorem::Bear2Hash,
        Theorem::Bear2Stream,
        Theorem::LionStream,
        Theorem::Lion2Stream,
        Theorem::Lion2Hash,
        Theorem::LionessStream,
        Theorem::LionessHash,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::LionSeedSingle => "R-LION-S1",
            Theorem::LionHashSingle => "R-LION-H1",
            Theorem::BearHash => "R-BEAR-H",
            Theorem::Bear2Hash => "R-BEAR2-H",
            Theorem::Bear2Stream => "R-BEAR2-S",
            Theorem::LionStream => "R-LION-S",
            Theorem::Lion2Stream => "R-LION2-S",
            Theorem::Lion2Hash => "R-LION2-H",
            Theorem::LionessStream => "R-LNS-S",
            Theorem::LionessHash => "R-LNS-H",
        }
    }

    pub fn scheme(self) -> SchemeKind {
        match self {
            Theorem::LionSeedSingle | Theorem::LionHashSingle | Theorem::LionStream => SchemeKind::Lion,
            Theorem::BearHash => SchemeKind::Bear,
            Theorem::Bear2Hash | Theorem::Bear2Stream => SchemeKind::Bear2,
            Theorem::Lion2Stream | Theorem::Lion2Hash => SchemeKind::Lion2,
            Theorem::LionessStream | Theorem::LionessHash => SchemeKind::Lioness,
        }
    }

    /// Single-pair reductions always query with exactly one pair.
    pub fn is_single_pair(self) -> bool {
        matches!(self, Theorem::LionSeedSingle | Theorem::LionHashSingle)
    }

    /// The 1-based subkey a multi-pair reduction recovers.
    pub fn unknown_subkey(self) -> Option<usize> {
        match self {
            Theorem::LionSeedSingle | Theorem::LionHashSingle => None,
            Theorem::BearHash
            | Theorem::Bear2Hash
            | Theorem::LionStream
            | Theorem::Lion2Stream
            | Theorem::LionessStream => Some(1),
            Theorem::Bear2Stream | Theorem::Lion2Hash => Some(2),
            Theorem::LionessHash => Some(4),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown theorem {s:?}")))
    }
}

/// The instance a reduction is asked to solve. It carries only public values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// Find a seed `M` with `S(M) = Y`.
    StreamOutput(BitStr),
    /// Find `X != R̃` with `H(X) = H(R̃)`, where the reduction picks `R̃`.
    HashCollision,
    /// Find `X` with `H(X) = Y`.
    HashPreimage(BitStr),
    /// Find `K` with `H_K(input) = z`.
    KeyedHash { z: BitStr, input: BitStr },
    /// Find `K` with `S(τ_K(base)) = z`.
    KeyedStream { z: BitStr, base: BitStr },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// The oracle found no consistent key.
    EmptyAnswer,
    /// Keys came back but none satisfies the target equation.
    NoKeySolves,
    /// No `R̃` within the retry cap led to a usable `X`; `(S, H)` behaved
    /// like a bad pairing for every value tried.
    GoodPairingViolation { attempts: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Failure),
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail(Failure::EmptyAnswer) => f.write_str("fail:empty-answer"),
            Verdict::Fail(Failure::NoKeySolves) => f.write_str("fail:no-key-solves"),
            Verdict::Fail(Failure::GoodPairingViolation { .. }) => f.write_str("fail:good-pairing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionReport {
    pub theorem: Theorem,
    pub n: usize,
    /// Pairs of the last oracle query; empty when no query was made.
    pub pairs: Vec<(Block, Block)>,
    /// Subkeys fixed by the reduction, as `(index, value)` with 1-based index.
    pub chosen: Vec<(usize, BitStr)>,
    pub answer: Option<OracleAnswer>,
    /// The recovered secret: a subkey, a stream seed, or a hash input.
    pub extracted: Option<BitStr>,
    pub verdict: Verdict,
    /// Keys the oracle scanned, summed over attempts.
    pub oracle_keys_scanned: u64,
    /// Pair construction and answer checking, on the reduction's own thread.
    pub reduction_cost: Cost,
    pub attempts: usize,
    /// The `R̃` of a collision search.
    pub decoy: Option<BitStr>,
}

struct Construction {
    pairs: Vec<(Block, Block)>,
    chosen: Vec<(usize, BitStr)>,
}

/// Checks one returned key: the candidate secret and whether it solves the target.
type Check<'a> = dyn Fn(&KeyMaterial) -> Result<(BitStr, bool)> + 'a;

struct Attempt {
    pairs: PairSet,
    chosen: Vec<(usize, BitStr)>,
    answer: OracleAnswer,
    extracted: Option<BitStr>,
    verdict: Verdict,
}

/// Runs reductions against one cipher and one oracle.
pub struct Reducer<'a> {
    cipher: &'a WideBlockCipher,
    oracle: &'a dyn KeyRecoveryOracle,
    image: Option<&'a StreamImage>,
    retry_cap: usize,
}

impl<'a> Reducer<'a> {
    pub fn new(cipher: &'a WideBlockCipher, oracle: &'a dyn KeyRecoveryOracle) -> Self {
        Reducer {
            cipher,
            oracle,
            image: None,
            retry_cap: DEFAULT_RETRY_CAP,
        }
    }

    /// Lets the collision and preimage searches skip values that cannot work,
    /// using a precomputed `Im(S)`.
    pub fn with_image(mut self, image: &'a StreamImage) -> Self {
        self.image = Some(image);
        self
    }

    pub fn with_retry_cap(mut self, cap: usize) -> Self {
        self.retry_cap = cap.max(1);
        self
    }

    /// Runs `theorem` on `target`. `n` is ignored by the single-pair reductions.
    pub fn reduce<R: RngCore + ?Sized>(
        &self,
        theorem: Theorem,
        target: &Target,
        n: usize,
        rng: &mut R,
    ) -> Result<ReductionReport> {
        if self.cipher.scheme() != theorem.scheme() {
            return Err(Error::Precondition(format!(
                "{theorem} needs a {} cipher, got {}",
                theorem.scheme(),
                self.cipher.scheme()
            )));
        }
        if !theorem.is_single_pair() && n == 0 {
            return Err(Error::Precondition("a reduction needs at least one pair".into()));
        }
        self.check_target(theorem, target)?;
        match (theorem, target) {
            (Theorem::LionSeedSingle, Target::StreamOutput(y)) => self.lion_seed_single(y, rng),
            (Theorem::LionHashSingle, Target::HashCollision) => self.lion_hash_single(None, rng),
            (Theorem::LionHashSingle, Target::HashPreimage(y)) => self.lion_hash_single(Some(y), rng),
            (_, Target::KeyedHash { z, input }) => self.multi_hash(theorem, z, input, n, rng),
            (_, Target::KeyedStream { z, base }) => self.multi_stream(theorem, z, base, n, rng),
            _ => unreachable!("target kinds were checked"),
        }
    }

    fn check_target(&self, theorem: Theorem, target: &Target) -> Result<()> {
        let p = self.cipher.params();
        let dims: Vec<(&'static str, usize, usize)> = match (theorem, target) {
            (Theorem::LionSeedSingle, Target::StreamOutput(y)) => vec![("stream output", p.r, y.len())],
            (Theorem::LionHashSingle, Target::HashCollision) => vec![],
            (Theorem::LionHashSingle, Target::HashPreimage(y)) => vec![("hash target", p.l, y.len())],
            (
                Theorem::BearHash | Theorem::Bear2Hash | Theorem::Lion2Hash | Theorem::LionessHash,
                Target::KeyedHash { z, input },
            ) => vec![("hash target", p.l, z.len()), ("hash input", p.r, input.len())],
            (
                Theorem::Bear2Stream | Theorem::LionStream | Theorem::Lion2Stream | Theorem::LionessStream,
                Target::KeyedStream { z, base },
            ) => vec![("stream target", p.r, z.len()), ("stream base", p.l, base.len())],
            _ => {
                return Err(Error::Precondition(format!(
                    "{theorem} cannot solve a target of this kind"
                )))
            }
        };
        for (what, want, got) in dims {
            if want != got {
                return Err(Error::dimension(what, want, got));
            }
        }
        Ok(())
    }

    /// Builds pairs, queries the oracle once and checks every key returned.
    fn attempt(&self, build: impl FnOnce() -> Result<Construction>, check: &Check<'_>, cost: &mut Cost) -> Result<Attempt> {
        let (built, c) = metrics::measure(build);
        *cost += c;
        let Construction { pairs, chosen } = built?;
        let pairs = PairSet::new(pairs)?;
        let answer = self.oracle.recover(&pairs)?;
        let (outcome, c) = metrics::measure(|| -> Result<(Option<BitStr>, Verdict)> {
            let mut first = None;
            for key in &answer.keys {
                let (candidate, solves) = check(key)?;
                if solves {
                    return Ok((Some(candidate), Verdict::Pass));
                }
                first.get_or_insert(candidate);
            }
            let failure = if answer.keys.is_empty() {
                Failure::EmptyAnswer
            } else {
                Failure::NoKeySolves
            };
            Ok((first, Verdict::Fail(failure)))
        });
        *cost += c;
        let (extracted, verdict) = outcome?;
        Ok(Attempt {
            pairs,
            chosen,
            answer,
            extracted,
            verdict,
        })
    }

    fn report(&self, theorem: Theorem, n: usize, a: Attempt, scanned: u64, cost: Cost, attempts: usize) -> ReductionReport {
        ReductionReport {
            theorem,
            n,
            pairs: a.pairs.pairs().to_vec(),
            chosen: a.chosen,
            answer: Some(a.answer),
            extracted: a.extracted,
            verdict: a.verdict,
            oracle_keys_scanned: scanned,
            reduction_cost: cost,
            attempts,
            decoy: None,
        }
    }

    /// Reads only `Y` and evaluates `S` and `H` as black boxes. With
    /// `K1 = τ^{-1}(L -> M)` the first round gives `R̄ = R + Y`, so a LION
    /// ciphertext can be written down without knowing `M`.
    fn lion_seed_single<R: RngCore + ?Sized>(&self, y: &BitStr, rng: &mut R) -> Result<ReductionReport> {
        let c = self.cipher;
        let p = *c.params();
        let mut cost = Cost::default();
        let (l, r, k2) = (random_bits(p.l, rng), random_bits(p.r, rng), random_bits(p.l, rng));
        let build = || {
            let rb = r.xor(y)?;
            let lp = l.xor(&c.hash(&rb)?)?;
            let rp = rb.xor(&c.keyed_stream(&k2, &lp)?)?;
            Ok(Construction {
                pairs: vec![(Block::new(l.clone(), r.clone()), Block::new(lp, rp))],
                chosen: vec![(2, k2.clone())],
            })
        };
        let check = |key: &KeyMaterial| {
            let seed = c.key_action().apply(key.k(1), &l)?;
            let solves = c.stream(&seed)? == *y;
            Ok((seed, solves))
        };
        let a = self.attempt(build, &check, &mut cost)?;
        let scanned = a.answer.keys_scanned;
        Ok(self.report(Theorem::LionSeedSingle, 1, a, scanned, cost, 1))
    }

    /// Queries with `{(L, 0), (L + Y, 0)}`: any consistent key has
    /// `X = S(τ_K1(L))` with `H(X) = Y`. In collision mode `Y = H(R̃)` for an
    /// `R̃` outside `Im(S)`, so `X != R̃`.
    fn lion_hash_single<R: RngCore + ?Sized>(
        &self,
        preimage_target: Option<&BitStr>,
        rng: &mut R,
    ) -> Result<ReductionReport> {
        let c = self.cipher;
        let p = *c.params();
        let mut cost = Cost::default();
        let mut scanned = 0;
        let mut last: Option<(Attempt, Option<BitStr>)> = None;
        let attempts_allowed = if preimage_target.is_some() { 1 } else { self.retry_cap };
        let mut attempts = 0;
        while attempts < attempts_allowed {
            attempts += 1;
            let (prepared, c_prep) = metrics::measure(|| -> Result<Option<(BitStr, Option<BitStr>)>> {
                let (y, decoy) = match preimage_target {
                    Some(y) => (y.clone(), None),
                    None => {
                        let decoy = random_bits(p.r, rng);
                        if self.image.is_some_and(|im| im.contains(&decoy)) {
                            return Ok(None);
                        }
                        (c.hash(&decoy)?, Some(decoy))
                    }
                };
                if let Some(im) = self.image {
                    let mut reachable = false;
                    for x in im.outputs() {
                        if c.hash(x)? == y {
                            reachable = true;
                            break;
                        }
                    }
                    if !reachable {
                        return Ok(None);
                    }
                }
                Ok(Some((y, decoy)))
            });
            cost += c_prep;
            let Some((y, decoy)) = prepared? else {
                continue;
            };
            let l = random_bits(p.l, rng);
            let build = || {
                let zero = BitStr::zeros(p.r);
                Ok(Construction {
                    pairs: vec![(Block::new(l.clone(), zero.clone()), Block::new(l.xor(&y)?, zero))],
                    chosen: Vec::new(),
                })
            };
            let check = |key: &KeyMaterial| {
                let x = c.keyed_stream(key.k(1), &l)?;
                let solves = c.hash(&x)? == y && decoy.as_ref() != Some(&x);
                Ok((x, solves))
            };
            let a = self.attempt(build, &check, &mut cost)?;
            scanned += a.answer.keys_scanned;
            let pass = a.verdict.is_pass();
            last = Some((a, decoy));
            if pass {
                break;
            }
        }
        let Some((mut a, decoy)) = last else {
            // Every candidate was screened out before reaching the oracle.
            return Ok(ReductionReport {
                theorem: Theorem::LionHashSingle,
                n: 1,
                pairs: Vec::new(),
                chosen: Vec::new(),
                answer: None,
                extracted: None,
                verdict: Verdict::Fail(Failure::GoodPairingViolation { attempts }),
                oracle_keys_scanned: scanned,
                reduction_cost: cost,
                attempts,
                decoy: None,
            });
        };
        if !a.verdict.is_pass() && preimage_target.is_none() {
            a.verdict = Verdict::Fail(Failure::GoodPairingViolation { attempts });
        }
        let mut report = self.report(Theorem::LionHashSingle, 1, a, scanned, cost, attempts);
        report.decoy = decoy;
        Ok(report)
    }

    /// Random values for every subkey except `unknown`.
    fn choose_subkeys<R: RngCore + ?Sized>(&self, unknown: usize, rng: &mut R) -> Vec<(usize, BitStr)> {
        self.cipher
            .scheme()
            .subkey_lengths(self.cipher.params())
            .iter()
            .enumerate()
            .filter(|&(i, _)| i + 1 != unknown)
            .map(|(i, &len)| (i + 1, random_bits(len, rng)))
            .collect()
    }

    fn multi_hash<R: RngCore + ?Sized>(
        &self,
        theorem: Theorem,
        z: &BitStr,
        input: &BitStr,
        n: usize,
        rng: &mut R,
    ) -> Result<ReductionReport> {
        let c = self.cipher;
        let p = *c.params();
        let mut cost = Cost::default();
        let unknown = theorem.unknown_subkey().expect("multi-pair theorem");
        let lefts = distinct_random_bits(p.l, n, rng);
        let chosen = self.choose_subkeys(unknown, rng);
        let k = |i: usize| &chosen.iter().find(|(j, _)| *j == i).expect("chosen subkey").1;
        let build = || {
            let mut pairs = Vec::with_capacity(n);
            for li in &lefts {
                let pair = match theorem {
                    // Plaintexts (L_i, R): the first round yields L̄_i = L_i + Z.
                    Theorem::BearHash | Theorem::Bear2Hash => {
                        let lb = li.xor(z)?;
                        let rp = match theorem {
                            Theorem::BearHash => input.xor(&c.stream(&lb)?)?,
                            _ => input.xor(&c.keyed_stream(k(2), &lb)?)?,
                        };
                        let last = if theorem == Theorem::BearHash { 2 } else { 3 };
                        let lp = lb.xor(&c.keyed_hash(k(last), &rp)?)?;
                        (Block::new(li.clone(), input.clone()), Block::new(lp, rp))
                    }
                    // R_i = X + S(τ_K1(L_i)) makes R̄_i = X, so L'_i = L_i + Z.
                    Theorem::Lion2Hash => {
                        let ri = input.xor(&c.keyed_stream(k(1), li)?)?;
                        let lp = li.xor(z)?;
                        let rp = input.xor(&c.keyed_stream(k(3), &lp)?)?;
                        (Block::new(li.clone(), ri), Block::new(lp, rp))
                    }
                    // Ciphertexts (L'_i, R') decrypted with K1..K3.
                    Theorem::LionessHash => {
                        let lb = li.xor(z)?;
                        let rb = input.xor(&c.keyed_stream(k(3), &lb)?)?;
                        let l = lb.xor(&c.keyed_hash(k(2), &rb)?)?;
                        let r = rb.xor(&c.keyed_stream(k(1), &l)?)?;
                        (Block::new(l, r), Block::new(li.clone(), input.clone()))
                    }
                    _ => unreachable!("hash-target theorem"),
                };
                pairs.push(pair);
            }
            Ok(Construction {
                pairs,
                chosen: chosen.clone(),
            })
        };
        let check = |key: &KeyMaterial| {
            let candidate = key.k(unknown).clone();
            let solves = c.keyed_hash(&candidate, input)? == *z;
            Ok((candidate, solves))
        };
        let a = self.attempt(build, &check, &mut cost)?;
        let scanned = a.answer.keys_scanned;
        Ok(self.report(theorem, n, a, scanned, cost, 1))
    }

    fn multi_stream<R: RngCore + ?Sized>(
        &self,
        theorem: Theorem,
        z: &BitStr,
        base: &BitStr,
        n: usize,
        rng: &mut R,
    ) -> Result<ReductionReport> {
        let c = self.cipher;
        let p = *c.params();
        let mut cost = Cost::default();
        let unknown = theorem.unknown_subkey().expect("multi-pair theorem");
        let rights = distinct_random_bits(p.r, n, rng);
        let chosen = self.choose_subkeys(unknown, rng);
        let k = |i: usize| &chosen.iter().find(|(j, _)| *j == i).expect("chosen subkey").1;
        let build = || {
            let mut pairs = Vec::with_capacity(n);
            for ri in &rights {
                let pair = match theorem {
                    // L_i = X + H_K1(R_i) makes L̄_i = X, so R'_i = R_i + Z.
                    Theorem::Bear2Stream => {
                        let li = base.xor(&c.keyed_hash(k(1), ri)?)?;
                        let rp = ri.xor(z)?;
                        let lp = base.xor(&c.keyed_hash(k(3), &rp)?)?;
                        (Block::new(li, ri.clone()), Block::new(lp, rp))
                    }
                    // Plaintexts (L, R_i): the first round yields R̄_i = R_i + Z.
                    Theorem::LionStream | Theorem::Lion2Stream => {
                        let rb = ri.xor(z)?;
                        let (hashed, last) = match theorem {
                            Theorem::LionStream => (c.hash(&rb)?, 2),
                            _ => (c.keyed_hash(k(2), &rb)?, 3),
                        };
                        let lp = base.xor(&hashed)?;
                        let rp = rb.xor(&c.keyed_stream(k(last), &lp)?)?;
                        (Block::new(base.clone(), ri.clone()), Block::new(lp, rp))
                    }
                    Theorem::LionessStream => {
                        let rb = ri.xor(z)?;
                        let lb = base.xor(&c.keyed_hash(k(2), &rb)?)?;
                        let rp = rb.xor(&c.keyed_stream(k(3), &lb)?)?;
                        let lp = lb.xor(&c.keyed_hash(k(4), &rp)?)?;
                        (Block::new(base.clone(), ri.clone()), Block::new(lp, rp))
                    }
                    _ => unreachable!("stream-target theorem"),
                };
                pairs.push(pair);
            }
            Ok(Construction {
                pairs,
                chosen: chosen.clone(),
            })
        };
        let check = |key: &KeyMaterial| {
            let candidate = key.k(unknown).clone();
            let solves = c.keyed_stream(&candidate, base)? == *z;
            Ok((candidate, solves))
        };
        let a = self.attempt(build, &check, &mut cost)?;
        let scanned = a.answer.keys_scanned;
        Ok(self.report(theorem, n, a, scanned, cost, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::harness::{parse_report, plant, Experiment, Task, TrialRecord};
    use super::*;
    use crate::analysis::image_of_stream;
    use crate::cipher::{KeyAction, ModularAddition, Translation};
    use crate::oracle::{BruteForceOracle, OracleMode};
    use crate::params::Params;
    use crate::primitives::{Primitives, UnkeyedHash};
    use crate::rng::seeded;
    use std::sync::Arc;

    fn toy() -> Params {
        Params::new(4, 8, 5).unwrap()
    }

    fn cipher(theorem: Theorem, action: Arc<dyn KeyAction>) -> WideBlockCipher {
        let p = toy();
        WideBlockCipher::new(theorem.scheme(), p, Primitives::toy(&p).unwrap())
            .unwrap()
            .with_key_action(action)
    }

    #[test]
    fn theorem_ids_roundtrip() {
        for t in Theorem::ALL {
            assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
            assert_eq!(t.is_single_pair(), t.unknown_subkey().is_none());
        }
        assert_eq!(Task::all().len(), 11);
        for task in Task::all() {
            assert_eq!(task.label().parse::<Task>().unwrap(), task);
        }
        assert!("R-BEAR-H:preimage".parse::<Task>().is_err());
        assert!("R-NOPE".parse::<Theorem>().is_err());
    }

    /// Brute-forces the consistent keys and keeps those whose unknown part
    /// is the planted secret, i.e. answers with the planted key itself.
    fn planted_oracle(
        c: &WideBlockCipher,
        keep: impl Fn(&KeyMaterial) -> bool + Send + Sync,
    ) -> impl KeyRecoveryOracle {
        let inner = BruteForceOracle::new(c.clone(), OracleMode::AllConsistent).with_parallelism(false);
        move |pairs: &PairSet| {
            let mut ans = inner.recover(pairs)?;
            ans.keys.retain(|k| keep(k));
            ans.keys.truncate(1);
            Ok(ans)
        }
    }

    #[test]
    fn planted_oracle_gives_exact_recovery() {
        for action in [Arc::new(Translation) as Arc<dyn KeyAction>, Arc::new(ModularAddition)] {
            for theorem in Theorem::ALL.into_iter().filter(|t| !t.is_single_pair()) {
                let c = cipher(theorem, action.clone());
                for seed in 0..5 {
                    let mut rng = seeded(seed);
                    let planted = plant(Task::new(theorem), &c, &mut rng).unwrap();
                    let secret = planted.secret.clone().unwrap();
                    let unknown = theorem.unknown_subkey().unwrap();
                    let oracle = planted_oracle(&c, move |k| *k.k(unknown) == secret);
                    let rep = Reducer::new(&c, &oracle).reduce(theorem, &planted.target, 2, &mut rng).unwrap();
                    assert!(rep.verdict.is_pass(), "{theorem}");
                    assert_eq!(rep.extracted, planted.secret, "{theorem}");
                }
            }
        }
    }

    #[test]
    fn planted_oracle_recovers_the_seed() {
        let c = cipher(Theorem::LionSeedSingle, Arc::new(Translation));
        for seed in 0..10 {
            let mut rng = seeded(seed);
            let planted = plant(Task::new(Theorem::LionSeedSingle), &c, &mut rng).unwrap();
            let m = planted.secret.clone().unwrap();
            // The planted key has K1 = M + L; the oracle sees L in the pair.
            let oracle = {
                let inner = BruteForceOracle::new(c.clone(), OracleMode::AllConsistent);
                let m = m.clone();
                move |pairs: &PairSet| {
                    let l = pairs.pairs()[0].0.left.clone();
                    let mut ans = inner.recover(pairs)?;
                    ans.keys.retain(|k| *k.k(1) == m.xor(&l).unwrap());
                    Ok(ans)
                }
            };
            let rep = Reducer::new(&c, &oracle)
                .reduce(Theorem::LionSeedSingle, &planted.target, 1, &mut rng)
                .unwrap();
            assert_eq!(rep.extracted, Some(m));
        }
    }

    #[test]
    fn stub_stream_makes_every_seed_valid() {
        let p = toy();
        let mut prims = Primitives::toy(&p).unwrap();
        prims.stream = Arc::new(crate::primitives::ZeroStream::new(4, 8));
        let c = WideBlockCipher::new(SchemeKind::Lion, p, prims).unwrap();
        let oracle = BruteForceOracle::new(c.clone(), OracleMode::FirstConsistent);
        let rep = Reducer::new(&c, &oracle)
            .reduce(Theorem::LionSeedSingle, &Target::StreamOutput(BitStr::zeros(8)), 1, &mut seeded(1))
            .unwrap();
        assert!(rep.verdict.is_pass());
    }

    #[test]
    fn every_trial_builds_valid_pairs_and_passes() {
        let exp = Experiment::new(toy(), OracleMode::AllConsistent);
        for task in Task::all() {
            for n in [1, 2, 4] {
                for out in exp.run(task, n, 100, 8).unwrap() {
                    assert!(out.pairs_valid, "{task} n={n} seed={}", out.seed);
                    assert!(out.report.verdict.is_pass(), "{task} n={n} seed={}", out.seed);
                    assert!(out.solver_agrees, "{task} n={n} seed={}", out.seed);
                    assert_eq!(out.report.reduction_cost.keys_enumerated, 0);
                    let expected_pairs = if task.theorem.is_single_pair() { 1 } else { n };
                    assert_eq!(out.report.pairs.len(), expected_pairs);
                }
            }
        }
    }

    #[test]
    fn modular_action_reductions_pass() {
        let mut exp = Experiment::new(toy(), OracleMode::AllConsistent);
        exp.action = Arc::new(ModularAddition);
        for task in Task::all() {
            for out in exp.run(task, 2, 7, 5).unwrap() {
                assert!(out.pairs_valid && out.report.verdict.is_pass() && out.solver_agrees, "{task}");
            }
        }
    }

    #[test]
    fn lion2_hash_pairs_collapse_to_x_after_first_round() {
        let c = cipher(Theorem::Lion2Hash, Arc::new(Translation));
        let exp = Experiment::new(toy(), OracleMode::AllConsistent);
        let out = exp.setup(Task::new(Theorem::Lion2Hash)).unwrap().trial(4, 3).unwrap();
        let Target::KeyedHash { input: x, .. } = &out.planted.target else {
            panic!("hash target")
        };
        let key = out.witness.unwrap();
        for (pt, _) in &out.report.pairs {
            let st = c.advance(1, key.k(1), &c.begin(pt).unwrap()).unwrap();
            assert_eq!(&st.right, x);
        }
    }

    #[test]
    fn collision_is_never_the_decoy() {
        let exp = Experiment::new(toy(), OracleMode::FirstConsistent);
        let setup = exp.setup(Task::new(Theorem::LionHashSingle)).unwrap();
        let image = setup.image().unwrap().clone();
        for seed in 0..30 {
            let out = setup.trial(1, seed).unwrap();
            let rep = &out.report;
            let decoy = rep.decoy.clone().unwrap();
            assert!(!image.contains(&decoy));
            if rep.verdict.is_pass() {
                let x = rep.extracted.clone().unwrap();
                assert_ne!(x, decoy);
                assert_eq!(setup.cipher().hash(&x).unwrap(), setup.cipher().hash(&decoy).unwrap());
            }
        }
    }

    /// `H(x) = 1` on `Im(S)` and `0` elsewhere: every `R̃` outside the image
    /// hashes to a value no image point reaches.
    #[derive(Debug)]
    struct Indicator(crate::analysis::StreamImage);

    impl UnkeyedHash for Indicator {
        fn input_len(&self) -> usize {
            8
        }
        fn output_len(&self) -> usize {
            4
        }
        fn compute(&self, msg: &BitStr) -> BitStr {
            BitStr::from_uint(self.0.contains(msg) as u64, 4)
        }
    }

    #[test]
    fn bad_pairing_exhausts_the_retry_cap() {
        let p = toy();
        let mut prims = Primitives::toy(&p).unwrap();
        let image = image_of_stream(prims.stream.as_ref()).unwrap();
        prims.hash = Arc::new(Indicator(image.clone()));
        let c = WideBlockCipher::new(SchemeKind::Lion, p, prims).unwrap();
        let oracle = BruteForceOracle::new(c.clone(), OracleMode::AllConsistent);
        let rep = Reducer::new(&c, &oracle)
            .with_image(&image)
            .with_retry_cap(10)
            .reduce(Theorem::LionHashSingle, &Target::HashCollision, 1, &mut seeded(2))
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Fail(Failure::GoodPairingViolation { attempts: 10 }));
        assert_eq!(rep.attempts, 10);
        assert!(rep.answer.is_none());
        // Without the hint an R̃ inside Im(S) can still give a real
        // collision, so only the oracle-side failures are counted.
        for seed in 0..20 {
            let rep = Reducer::new(&c, &oracle)
                .with_retry_cap(3)
                .reduce(Theorem::LionHashSingle, &Target::HashCollision, 1, &mut seeded(seed))
                .unwrap();
            match rep.verdict {
                Verdict::Pass => assert!(image.contains(rep.decoy.as_ref().unwrap())),
                v => assert_eq!(v, Verdict::Fail(Failure::GoodPairingViolation { attempts: 3 })),
            }
        }
    }

    #[test]
    fn preimage_of_unreachable_value_fails() {
        let p = toy();
        let mut prims = Primitives::toy(&p).unwrap();
        let image = image_of_stream(prims.stream.as_ref()).unwrap();
        prims.hash = Arc::new(Indicator(image));
        let c = WideBlockCipher::new(SchemeKind::Lion, p, prims).unwrap();
        let oracle = BruteForceOracle::new(c.clone(), OracleMode::AllConsistent);
        let rep = Reducer::new(&c, &oracle)
            .reduce(Theorem::LionHashSingle, &Target::HashPreimage(BitStr::from_uint(7, 4)), 1, &mut seeded(3))
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Fail(Failure::EmptyAnswer));
    }

    #[test]
    fn misuse_is_rejected() {
        let c = cipher(Theorem::BearHash, Arc::new(Translation));
        let oracle = BruteForceOracle::new(c.clone(), OracleMode::AllConsistent);
        let r = Reducer::new(&c, &oracle);
        let target = Target::KeyedHash {
            z: BitStr::zeros(4),
            input: BitStr::zeros(8),
        };
        assert!(r.reduce(Theorem::BearHash, &target, 0, &mut seeded(1)).is_err());
        assert!(r.reduce(Theorem::LionStream, &target, 1, &mut seeded(1)).is_err());
        assert!(r.reduce(Theorem::BearHash, &Target::HashCollision, 1, &mut seeded(1)).is_err());
        let short = Target::KeyedHash {
            z: BitStr::zeros(3),
            input: BitStr::zeros(8),
        };
        assert!(matches!(
            r.reduce(Theorem::BearHash, &short, 1, &mut seeded(1)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn records_roundtrip() {
        let exp = Experiment::new(toy(), OracleMode::FirstConsistent);
        let mut text = String::from(TrialRecord::HEADER);
        text.push('\n');
        let mut records = Vec::new();
        for task in Task::all() {
            for out in exp.run(task, 2, 1, 2).unwrap() {
                let rec = out.record();
                text.push_str(&rec.to_line());
                text.push('\n');
                records.push(rec);
            }
        }
        assert_eq!(parse_report(&text).unwrap(), records);
        assert!(TrialRecord::parse_line("R-BEAR-H\tall-consistent\t1").is_err());
    }

    #[test]
    fn same_seed_same_trial() {
        let exp = Experiment::new(toy(), OracleMode::FirstConsistent);
        for task in Task::all() {
            let a: Vec<_> = exp.run(task, 2, 9, 3).unwrap().iter().map(|o| o.record()).collect();
            let b: Vec<_> = exp.run(task, 2, 9, 3).unwrap().iter().map(|o| o.record()).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cap_refusal_happens_at_setup() {
        let mut exp = Experiment::new(toy(), OracleMode::AllConsistent);
        exp.cap_bits = 12;
        assert!(matches!(
            exp.setup(Task::new(Theorem::LionessStream)),
            Err(Error::KeySpaceTooLarge { bits: 18, .. })
        ));
        assert!(exp.setup(Task::new(Theorem::LionStream)).is_ok());
    }

    #[test]
    fn stream_image_hint_is_used_only_for_screening() {
        // Without the hint the collision search still succeeds at toy scale.
        let c = cipher(Theorem::LionHashSingle, Arc::new(Translation));
        let oracle = BruteForceOracle::new(c.clone(), OracleMode::AllConsistent);
        let mut passes = 0;
        for seed in 0..20 {
            let rep = Reducer::new(&c, &oracle)
                .reduce(Theorem::LionHashSingle, &Target::HashCollision, 1, &mut seeded(seed))
                .unwrap();
            passes += rep.verdict.is_pass() as usize;
        }
        assert!(passes > 0);
    }
}
