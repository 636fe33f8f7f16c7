//! Planted trials: generate an instance from a known secret, run the
//! reduction against a brute-force oracle, and audit the result.
//!
//! The audit rebuilds the full key the constructed pairs were meant to be
//! consistent with (the witness), re-encrypts every pair under it, and checks
//! the extracted secret against the exhaustive solvers in
//! [`crate::analysis`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::analysis::{image_of_stream, solve_keyed_hash_equation, solve_stream_equation, StreamImage};
use crate::bits::BitStr;
use crate::cipher::{KeyAction, Translation, WideBlockCipher};
use crate::error::{Error, Result};
use crate::oracle::{BruteForceOracle, KeySpace, OracleMode, DEFAULT_KEY_CAP_BITS};
use crate::params::{KeyMaterial, Params};
use crate::primitives::{PrimitiveFamily, Primitives};
use crate::rng::{random_bits, seeded, ExperimentRng};

use super::{ReductionReport, Reducer, Target, Theorem, DEFAULT_RETRY_CAP};

/// A theorem together with the hash search it runs. Only `R-LION-H1` has a
/// preimage variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Task {
    pub theorem: Theorem,
    pub preimage: bool,
}

impl Task {
    pub fn new(theorem: Theorem) -> Self {
        Task { theorem, preimage: false }
    }

    pub fn preimage() -> Self {
        Task {
            theorem: Theorem::LionHashSingle,
            preimage: true,
        }
    }

    /// Every theorem, with `R-LION-H1` in both collision and preimage form.
    pub fn all() -> Vec<Task> {
        let mut tasks: Vec<Task> = Theorem::ALL.into_iter().map(Task::new).collect();
        let at = tasks.iter().position(|t| t.theorem == Theorem::LionHashSingle).expect("listed") + 1;
        tasks.insert(at, Task::preimage());
        tasks
    }

    pub fn label(&self) -> String {
        if self.preimage {
            format!("{}:preimage", self.theorem)
        } else {
            self.theorem.to_string()
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((id, variant)) if variant.eq_ignore_ascii_case("preimage") => {
                let theorem: Theorem = id.parse()?;
                if theorem != Theorem::LionHashSingle {
                    return Err(Error::Parse(format!("{theorem} has no preimage variant")));
                }
                Ok(Task::preimage())
            }
            Some(_) => Err(Error::Parse(format!("unknown task {s:?}"))),
            None => Ok(Task::new(s.parse()?)),
        }
    }
}

/// A target together with the secret it was generated from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planted {
    pub target: Target,
    /// The seed `M` for seed and preimage targets, the unknown subkey for
    /// multi-pair targets, nothing for collisions.
    pub secret: Option<BitStr>,
}

pub fn plant(task: Task, cipher: &WideBlockCipher, rng: &mut ExperimentRng) -> Result<Planted> {
    let p = *cipher.params();
    let theorem = task.theorem;
    if theorem == Theorem::LionSeedSingle {
        let m = random_bits(p.l, rng);
        let y = cipher.stream(&m)?;
        return Ok(Planted {
            target: Target::StreamOutput(y),
            secret: Some(m),
        });
    }
    if theorem == Theorem::LionHashSingle {
        if !task.preimage {
            return Ok(Planted {
                target: Target::HashCollision,
                secret: None,
            });
        }
        let m = random_bits(p.l, rng);
        let y = cipher.hash(&cipher.stream(&m)?)?;
        return Ok(Planted {
            target: Target::HashPreimage(y),
            secret: Some(m),
        });
    }
    let unknown = theorem.unknown_subkey().expect("multi-pair theorem");
    let key_len = theorem.scheme().subkey_lengths(&p)[unknown - 1];
    let key = random_bits(key_len, rng);
    let target = match theorem {
        Theorem::BearHash | Theorem::Bear2Hash | Theorem::Lion2Hash | Theorem::LionessHash => {
            let input = random_bits(p.r, rng);
            let z = cipher.keyed_hash(&key, &input)?;
            Target::KeyedHash { z, input }
        }
        _ => {
            let base = random_bits(p.l, rng);
            let z = cipher.keyed_stream(&key, &base)?;
            Target::KeyedStream { z, base }
        }
    };
    Ok(Planted {
        target,
        secret: Some(key),
    })
}

/// The full key that the report's pairs were built to be consistent with.
/// `None` when no pairs were built.
pub fn witness(
    task: Task,
    cipher: &WideBlockCipher,
    image: Option<&StreamImage>,
    planted: &Planted,
    report: &ReductionReport,
) -> Result<Option<KeyMaterial>> {
    let Some((pt, ct)) = report.pairs.first() else {
        return Ok(None);
    };
    let p = cipher.params();
    let action = cipher.key_action();
    let scheme = task.theorem.scheme();
    let chosen = |i: usize| {
        report
            .chosen
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, k)| k.clone())
            .ok_or_else(|| Error::Precondition(format!("report lacks chosen K{i}")))
    };
    let subkeys = match task.theorem {
        Theorem::LionSeedSingle => {
            let m = planted.secret.as_ref().expect("planted seed");
            vec![action.key_between(&pt.left, m)?, chosen(2)?]
        }
        Theorem::LionHashSingle => {
            let y = ct.left.xor(&pt.left)?;
            let m = match &planted.secret {
                Some(m) => m.clone(),
                None => {
                    let image = image.ok_or_else(|| Error::Precondition("collision witness needs Im(S)".into()))?;
                    let mut found = None;
                    for x in image.outputs() {
                        if cipher.hash(x)? == y && report.decoy.as_ref() != Some(x) {
                            found = Some(image.seeds_of(x)[0].clone());
                            break;
                        }
                    }
                    match found {
                        Some(m) => m,
                        None => return Ok(None),
                    }
                }
            };
            vec![action.key_between(&pt.left, &m)?, action.key_between(&ct.left, &m)?]
        }
        theorem => {
            let unknown = theorem.unknown_subkey().expect("multi-pair theorem");
            (1..=scheme.subkey_lengths(p).len())
                .map(|i| {
                    if i == unknown {
                        Ok(planted.secret.clone().expect("planted subkey"))
                    } else {
                        chosen(i)
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    KeyMaterial::new(scheme, p, subkeys).map(Some)
}

/// Whether the extracted secret is among the exhaustive solutions of the
/// planted target.
pub fn solver_agrees(
    cipher: &WideBlockCipher,
    image: Option<&StreamImage>,
    planted: &Planted,
    report: &ReductionReport,
) -> Result<bool> {
    let Some(secret) = &report.extracted else {
        return Ok(false);
    };
    let prims = cipher.primitives();
    let need_image = || image.ok_or_else(|| Error::Precondition("this check needs Im(S)".into()));
    Ok(match &planted.target {
        Target::StreamOutput(y) => need_image()?.seeds_of(y).contains(secret),
        Target::HashCollision | Target::HashPreimage(_) => {
            let y = match &planted.target {
                Target::HashPreimage(y) => y.clone(),
                _ => match &report.decoy {
                    Some(decoy) => cipher.hash(decoy)?,
                    None => return Ok(false),
                },
            };
            need_image()?.contains(secret) && cipher.hash(secret)? == y && report.decoy.as_ref() != Some(secret)
        }
        Target::KeyedHash { z, input } => {
            solve_keyed_hash_equation(prims.keyed_hash.as_ref(), z, input)?.contains(secret)
        }
        Target::KeyedStream { z, base } => {
            solve_stream_equation(prims.stream.as_ref(), cipher.key_action(), z, base)?.contains(secret)
        }
    })
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub task: Task,
    pub mode: OracleMode,
    pub seed: u64,
    pub planted: Planted,
    pub report: ReductionReport,
    pub witness: Option<KeyMaterial>,
    /// Every constructed pair re-encrypts under the witness.
    pub pairs_valid: bool,
    pub solver_agrees: bool,
}

impl TrialOutcome {
    pub fn record(&self) -> TrialRecord {
        TrialRecord {
            task: self.task.label(),
            mode: self.mode,
            seed: self.seed,
            n: self.report.n,
            verdict: self.report.verdict.to_string(),
            oracle_keys: self.report.oracle_keys_scanned,
            reduction_evals: self.report.reduction_cost.primitive_evals(),
            reduction_keys: self.report.reduction_cost.keys_enumerated,
            pairs_valid: self.pairs_valid,
            solver_agrees: self.solver_agrees,
            extracted: self.report.extracted.as_ref().map(BitStr::to_hex),
        }
    }
}

/// Everything a batch of trials shares.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub params: Params,
    pub family: PrimitiveFamily,
    pub mode: OracleMode,
    pub cap_bits: u32,
    pub retry_cap: usize,
    pub action: Arc<dyn KeyAction>,
}

impl Experiment {
    pub fn new(params: Params, mode: OracleMode) -> Self {
        Experiment {
            params,
            family: PrimitiveFamily::Toy,
            mode,
            cap_bits: DEFAULT_KEY_CAP_BITS,
            retry_cap: DEFAULT_RETRY_CAP,
            action: Arc::new(Translation),
        }
    }

    /// Builds the cipher and oracle for `task`, refusing before any work if
    /// the key space is above the cap.
    pub fn setup(&self, task: Task) -> Result<TaskSetup> {
        let scheme = task.theorem.scheme();
        KeySpace::new(scheme, &self.params).ensure_within(self.cap_bits)?;
        let prims = Primitives::of_family(self.family, &self.params)?;
        let cipher = WideBlockCipher::new(scheme, self.params, prims)?.with_key_action(self.action.clone());
        let oracle = BruteForceOracle::new(cipher.clone(), self.mode).with_cap_bits(self.cap_bits);
        let image = if task.theorem.is_single_pair() {
            Some(image_of_stream(cipher.primitives().stream.as_ref())?)
        } else {
            None
        };
        Ok(TaskSetup {
            task,
            mode: self.mode,
            retry_cap: self.retry_cap,
            cipher,
            oracle,
            image,
        })
    }

    /// Runs `trials` trials with seeds `base_seed, base_seed + 1, ...`.
    pub fn run(&self, task: Task, n: usize, base_seed: u64, trials: usize) -> Result<Vec<TrialOutcome>> {
        let setup = self.setup(task)?;
        (0..trials as u64)
            .into_par_iter()
            .map(|i| setup.trial(n, base_seed.wrapping_add(i)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct TaskSetup {
    task: Task,
    mode: OracleMode,
    retry_cap: usize,
    cipher: WideBlockCipher,
    oracle: BruteForceOracle,
    image: Option<StreamImage>,
}

impl TaskSetup {
    pub fn cipher(&self) -> &WideBlockCipher {
        &self.cipher
    }

    pub fn image(&self) -> Option<&StreamImage> {
        self.image.as_ref()
    }

    pub fn trial(&self, n: usize, seed: u64) -> Result<TrialOutcome> {
        let n = if self.task.theorem.is_single_pair() { 1 } else { n };
        let mut rng = seeded(seed);
        let planted = plant(self.task, &self.cipher, &mut rng)?;
        let mut reducer = Reducer::new(&self.cipher, &self.oracle).with_retry_cap(self.retry_cap);
        if let Some(image) = &self.image {
            reducer = reducer.with_image(image);
        }
        let report = reducer.reduce(self.task.theorem, &planted.target, n, &mut rng)?;
        let witness = witness(self.task, &self.cipher, self.image.as_ref(), &planted, &report)?;
        let pairs_valid = match &witness {
            Some(key) => self.cipher.is_consistent(key, report.pairs.iter().map(|(p, c)| (p, c)))?,
            None => false,
        };
        let solver_agrees = solver_agrees(&self.cipher, self.image.as_ref(), &planted, &report)?;
        Ok(TrialOutcome {
            task: self.task,
            mode: self.mode,
            seed,
            planted,
            report,
            witness,
            pairs_valid,
            solver_agrees,
        })
    }
}

/// One line of a reduction report file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub task: String,
    pub mode: OracleMode,
    pub seed: u64,
    pub n: usize,
    pub verdict: String,
    pub oracle_keys: u64,
    pub reduction_evals: u64,
    pub reduction_keys: u64,
    pub pairs_valid: bool,
    pub solver_agrees: bool,
    /// Hex of the extracted secret.
    pub extracted: Option<String>,
}

impl TrialRecord {
    pub const HEADER: &'static str = "# theorem\tmode\tseed\tn\tverdict\toracle_keys\treduction_evals\treduction_keys\tpairs_valid\tsolver_agrees\textracted";

    pub fn is_pass(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.task,
            self.mode.name(),
            self.seed,
            self.n,
            self.verdict,
            self.oracle_keys,
            self.reduction_evals,
            self.reduction_keys,
            self.pairs_valid,
            self.solver_agrees,
            self.extracted.as_deref().unwrap_or("-")
        )
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 11 {
            return Err(Error::Parse(format!("expected 11 fields, got {}", fields.len())));
        }
        let num = |i: usize| -> Result<u64> {
            fields[i]
                .parse()
                .map_err(|_| Error::Parse(format!("field {} is not a number: {:?}", i + 1, fields[i])))
        };
        let flag = |i: usize| -> Result<bool> {
            fields[i]
                .parse()
                .map_err(|_| Error::Parse(format!("field {} is not a boolean: {:?}", i + 1, fields[i])))
        };
        Ok(TrialRecord {
            task: fields[0].parse::<Task>()?.label(),
            mode: fields[1].parse()?,
            seed: num(2)?,
            n: num(3)? as usize,
            verdict: fields[4].to_string(),
            oracle_keys: num(5)?,
            reduction_evals: num(6)?,
            reduction_keys: num(7)?,
            pairs_valid: flag(8)?,
            solver_agrees: flag(9)?,
            extracted: match fields[10] {
                "-" => None,
                hex => {
                    BitStr::from_hex(hex, hex.len() * 4)
                        .map_err(|_| Error::Parse(format!("bad hex {hex:?}")))?;
                    Some(hex.to_string())
                }
            },
        })
    }
}

/// Parses a report file, skipping comment lines.
pub fn parse_report(text: &str) -> Result<Vec<TrialRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(TrialRecord::parse_line)
        .collect()
}
