//! The four subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bearlion_core::analysis::{
    good_pairing_profile, hr_surjectivity, image_of_stream, image_record, DEFAULT_PREIMAGE_SAMPLES,
    DEFAULT_SURJECTIVITY_SAMPLES,
};
use bearlion_core::oracle::OracleMode;
use bearlion_core::primitives::{PrimitiveFamily, Primitives};
use bearlion_core::reductions::harness::{TrialRecord, Task};
use bearlion_core::rng::seeded;
use bearlion_core::{Params, SchemeKind};

use crate::config::ExperimentConfig;
use crate::container;
use crate::error::CliError;

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, data: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, data).map_err(|e| CliError::io(path, e))
}

pub fn encrypt(scheme: SchemeKind, key: &Path, input: &Path, output: &Path) -> Result<(), CliError> {
    let out = container::encrypt_bytes(scheme, &read(key)?, &read(input)?)?;
    write(output, &out)
}

pub fn decrypt(scheme: Option<SchemeKind>, key: &Path, input: &Path, output: &Path) -> Result<(), CliError> {
    let out = container::decrypt_bytes(scheme, &read(key)?, &read(input)?)?;
    write(output, &out)
}

/// Pass counts for one task, mode and pair count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassRate {
    pub task: Task,
    pub mode: OracleMode,
    pub n: usize,
    pub passed: usize,
    pub trials: usize,
}

impl PassRate {
    pub fn rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.passed as f64 / self.trials as f64)
    }

    pub fn summary_line(&self) -> String {
        let rate = self.rate().map_or("-".to_string(), |r| format!("{r:.2}"));
        format!(
            "{}\t{}\tn={}\tpass_rate={rate}\t({}/{})",
            self.task,
            self.mode.name(),
            self.n,
            self.passed,
            self.trials
        )
    }
}

#[derive(Debug, Clone)]
pub struct ReduceOutcome {
    /// The report file contents.
    pub report: String,
    pub rates: Vec<PassRate>,
    /// Trials whose pairs did not re-encrypt under the planted witness.
    pub invalid_pairs: usize,
}

/// Runs every configured task and pair count in order.
pub fn run_reduce(config: &ExperimentConfig) -> Result<ReduceOutcome, CliError> {
    let exp = config.experiment();
    let mut report = String::new();
    writeln!(report, "{}", TrialRecord::HEADER).expect("string write");
    let mut rates = Vec::new();
    let mut invalid_pairs = 0;
    for &task in &config.tasks {
        for n in config.pair_counts(task) {
            let outcomes = exp.run(task, n, config.seed, config.trials)?;
            let mut passed = 0;
            for out in &outcomes {
                let rec = out.record();
                passed += rec.is_pass() as usize;
                invalid_pairs += (!rec.pairs_valid) as usize;
                writeln!(report, "{}", rec.to_line()).expect("string write");
            }
            rates.push(PassRate {
                task,
                mode: config.mode,
                n,
                passed,
                trials: outcomes.len(),
            });
        }
    }
    Ok(ReduceOutcome {
        report,
        rates,
        invalid_pairs,
    })
}

/// Writes the report and summary; fails when the constructions or the
/// all-consistent guarantee did not hold.
pub fn reduce(config: &ExperimentConfig) -> Result<(), CliError> {
    let outcome = run_reduce(config)?;
    let summary: String = outcome.rates.iter().map(|r| r.summary_line() + "\n").collect();
    match &config.out {
        Some(path) => {
            write(path, outcome.report.as_bytes())?;
            print!("{summary}");
        }
        None => {
            print!("{}", outcome.report);
            eprint!("{summary}");
        }
    }
    if outcome.invalid_pairs > 0 {
        return Err(CliError::Verification(format!(
            "{} trials built pairs inconsistent with the planted key",
            outcome.invalid_pairs
        )));
    }
    if config.mode == OracleMode::AllConsistent {
        let failed: usize = outcome.rates.iter().map(|r| r.trials - r.passed).sum();
        if failed > 0 {
            return Err(CliError::Verification(format!(
                "{failed} trials failed although the oracle returned every consistent key"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analysis {
    Image,
    GoodPairing,
    Surjectivity,
}

#[derive(Debug, Clone)]
pub struct AnalyzeConfig {
    pub params: Params,
    pub stream: PrimitiveFamily,
    pub hash: PrimitiveFamily,
    pub samples: Option<usize>,
    pub seed: u64,
}

/// The analysis record, one line.
pub fn run_analyze(which: Analysis, cfg: &AnalyzeConfig) -> Result<String, CliError> {
    let stream = Primitives::of_family(cfg.stream, &cfg.params)?.stream;
    let hashes = Primitives::of_family(cfg.hash, &cfg.params)?;
    let mut rng = seeded(cfg.seed);
    Ok(match which {
        Analysis::Image => image_record(&image_of_stream(stream.as_ref())?, cfg.params.r),
        Analysis::GoodPairing => good_pairing_profile(
            stream.as_ref(),
            hashes.hash.as_ref(),
            cfg.samples.unwrap_or(DEFAULT_PREIMAGE_SAMPLES),
            &mut rng,
        )?
        .to_record(),
        Analysis::Surjectivity => hr_surjectivity(
            hashes.keyed_hash.as_ref(),
            cfg.samples.unwrap_or(DEFAULT_SURJECTIVITY_SAMPLES),
            &mut rng,
        )?
        .to_record(cfg.params.l, cfg.params.k),
    })
}

pub fn analyze(which: Analysis, cfg: &AnalyzeConfig, out: Option<&PathBuf>) -> Result<(), CliError> {
    let line = run_analyze(which, cfg)? + "\n";
    match out {
        Some(path) => write(path, line.as_bytes()),
        None => {
            print!("{line}");
            Ok(())
        }
    }
}
