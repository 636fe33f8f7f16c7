//! Reduction experiment settings from flags and an optional TOML file.
//!
//! Flags override file values; anything unset falls back to the toy
//! defaults `l = 4`, `r = 2l`, `k = l + 1`, `n = 1,2,4`, 100 trials,
//! all-consistent mode, seed 1.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use bearlion_core::oracle::{KeySpace, OracleMode, DEFAULT_KEY_CAP_BITS};
use bearlion_core::primitives::PrimitiveFamily;
use bearlion_core::reductions::harness::{Experiment, Task};
use bearlion_core::reductions::DEFAULT_RETRY_CAP;
use bearlion_core::{KeyAction, ModularAddition, Params, Translation};
use serde::Deserialize;

use crate::error::CliError;

/// The file form; every field is optional.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub theorems: Option<Vec<String>>,
    pub l: Option<usize>,
    pub r: Option<usize>,
    pub k: Option<usize>,
    pub n: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub primitives: Option<String>,
    pub key_cap_bits: Option<u32>,
    pub retry_cap: Option<usize>,
    pub key_action: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
    }

    /// Fills every field unset here from `base`.
    pub fn or(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            theorems: self.theorems.or(base.theorems),
            l: self.l.or(base.l),
            r: self.r.or(base.r),
            k: self.k.or(base.k),
            n: self.n.or(base.n),
            trials: self.trials.or(base.trials),
            mode: self.mode.or(base.mode),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            primitives: self.primitives.or(base.primitives),
            key_cap_bits: self.key_cap_bits.or(base.key_cap_bits),
            retry_cap: self.retry_cap.or(base.retry_cap),
            key_action: self.key_action.or(base.key_action),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub tasks: Vec<Task>,
    pub params: Params,
    pub n: Vec<usize>,
    pub trials: usize,
    pub mode: OracleMode,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub family: PrimitiveFamily,
    pub key_cap_bits: u32,
    pub retry_cap: usize,
    pub action: Arc<dyn KeyAction>,
}

impl ExperimentConfig {
    /// Resolves defaults and checks every cap before any trial runs.
    pub fn resolve(file: ConfigFile) -> Result<Self, CliError> {
        let tasks = parse_tasks(file.theorems.as_deref().unwrap_or(&["all".to_string()]))?;
        let l = file.l.unwrap_or(4);
        let params = Params::new(l, file.r.unwrap_or(2 * l), file.k.unwrap_or(l + 1))?;
        let n = file.n.unwrap_or_else(|| vec![1, 2, 4]);
        if n.is_empty() || n.contains(&0) {
            return Err(CliError::Usage("--n needs pair counts of at least 1".into()));
        }
        let key_cap_bits = file.key_cap_bits.unwrap_or(DEFAULT_KEY_CAP_BITS);
        for task in &tasks {
            KeySpace::new(task.theorem.scheme(), &params).ensure_within(key_cap_bits)?;
        }
        for task in &tasks {
            params.validate_for(task.theorem.scheme())?;
        }
        let action: Arc<dyn KeyAction> = match file.key_action.as_deref().unwrap_or("translation") {
            "translation" => Arc::new(Translation),
            "modular" => Arc::new(ModularAddition),
            other => return Err(CliError::Usage(format!("unknown key action {other:?}"))),
        };
        Ok(ExperimentConfig {
            tasks,
            params,
            n,
            trials: file.trials.unwrap_or(100),
            mode: file.mode.as_deref().unwrap_or("all-consistent").parse().map_err(usage)?,
            seed: file.seed.unwrap_or(1),
            out: file.out,
            family: file.primitives.as_deref().unwrap_or("toy").parse().map_err(usage)?,
            key_cap_bits,
            retry_cap: file.retry_cap.unwrap_or(DEFAULT_RETRY_CAP),
            action,
        })
    }

    pub fn experiment(&self) -> Experiment {
        let mut exp = Experiment::new(self.params, self.mode);
        exp.family = self.family;
        exp.cap_bits = self.key_cap_bits;
        exp.retry_cap = self.retry_cap;
        exp.action = self.action.clone();
        exp
    }

    /// Pair counts to run for `task`; single-pair theorems always use one.
    pub fn pair_counts(&self, task: Task) -> Vec<usize> {
        if task.theorem.is_single_pair() {
            vec![1]
        } else {
            self.n.clone()
        }
    }
}

fn usage(e: bearlion_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_tasks(names: &[String]) -> Result<Vec<Task>, CliError> {
    let mut tasks = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            tasks.extend(Task::all());
        } else {
            tasks.push(name.parse::<Task>().map_err(usage)?);
        }
    }
    if tasks.is_empty() {
        return Err(CliError::Usage("no theorem selected".into()));
    }
    let mut seen = Vec::new();
    tasks.retain(|t| {
        let fresh = !seen.contains(t);
        seen.push(*t);
        fresh
    });
    Ok(tasks)
}
