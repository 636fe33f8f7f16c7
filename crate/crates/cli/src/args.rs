//! Argument definitions.

use std::path::PathBuf;

use bearlion_core::primitives::PrimitiveFamily;
use bearlion_core::{Params, SchemeKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, Analysis, AnalyzeConfig};
use crate::config::{ConfigFile, ExperimentConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "bearlion", version, about = "Wide-block ciphers from a stream cipher and a hash")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a file under the production primitives.
    Encrypt(EncryptArgs),
    /// Decrypt a file produced by `encrypt`.
    Decrypt(DecryptArgs),
    /// Run the key-recovery reductions against a brute-force oracle.
    Reduce(ReduceArgs),
    /// Measure properties of the toy or stub primitives.
    Analyze {
        #[command(subcommand)]
        which: AnalyzeCommand,
    },
}

#[derive(Debug, Args)]
pub struct EncryptArgs {
    #[arg(long)]
    pub scheme: SchemeKind,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in", short = 'i')]
    pub input: PathBuf,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecryptArgs {
    /// Expected scheme; taken from the header when omitted.
    #[arg(long)]
    pub scheme: Option<SchemeKind>,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in", short = 'i')]
    pub input: PathBuf,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct ReduceArgs {
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `all` or comma-separated ids such as R-BEAR-H,R-LION-H1:preimage.
    #[arg(long, value_delimiter = ',')]
    pub theorem: Option<Vec<String>>,
    #[arg(long)]
    pub l: Option<usize>,
    /// Defaults to 2l.
    #[arg(long)]
    pub r: Option<usize>,
    /// Defaults to l + 1.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// all-consistent or first-consistent.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report file; without it the report goes to stdout and the summary to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// toy, stub or prod.
    #[arg(long)]
    pub primitives: Option<String>,
    #[arg(long)]
    pub key_cap_bits: Option<u32>,
    #[arg(long)]
    pub retry_cap: Option<usize>,
    /// translation or modular.
    #[arg(long)]
    pub key_action: Option<String>,
}

impl ReduceArgs {
    pub fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            theorems: self.theorem,
            l: self.l,
            r: self.r,
            k: self.k,
            n: self.n,
            trials: self.trials,
            mode: self.mode,
            seed: self.seed,
            out: self.out,
            primitives: self.primitives,
            key_cap_bits: self.key_cap_bits,
            retry_cap: self.retry_cap,
            key_action: self.key_action,
        };
        ExperimentConfig::resolve(flags.or(file))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Toy,
    Stub,
}

impl From<FamilyArg> for PrimitiveFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Toy => PrimitiveFamily::Toy,
            FamilyArg::Stub => PrimitiveFamily::Stub,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value_t = 4)]
    pub l: usize,
    /// Defaults to 2l.
    #[arg(long)]
    pub r: Option<usize>,
    /// Defaults to l + 1.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "toy")]
    pub stream: FamilyArg,
    #[arg(long, value_enum, default_value = "toy")]
    pub hash: FamilyArg,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Size of the stream cipher's image.
    Image(AnalyzeArgs),
    /// How often H(S(K)) lands back on its seed.
    GoodPairing(AnalyzeArgs),
    /// Whether the keyed hash reaches every output for sampled inputs.
    Surjectivity(AnalyzeArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encrypt(a) => commands::encrypt(a.scheme, &a.key, &a.input, &a.out),
        Command::Decrypt(a) => commands::decrypt(a.scheme, &a.key, &a.input, &a.out),
        Command::Reduce(a) => commands::reduce(&a.resolve()?),
        Command::Analyze { which } => {
            let (which, a) = match which {
                AnalyzeCommand::Image(a) => (Analysis::Image, a),
                AnalyzeCommand::GoodPairing(a) => (Analysis::GoodPairing, a),
                AnalyzeCommand::Surjectivity(a) => (Analysis::Surjectivity, a),
            };
            let cfg = AnalyzeConfig {
                params: Params::new(a.l, a.r.unwrap_or(2 * a.l), a.k.unwrap_or(a.l + 1))?,
                stream: a.stream.into(),
                hash: a.hash.into(),
                samples: a.samples,
                seed: a.seed,
            };
            commands::analyze(which, &cfg, a.out.as_ref())
        }
    }
}
