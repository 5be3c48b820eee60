use clap::{Args, Parser, Subcommand, ValueEnum};
use modpois::model::{Coupling, IndexConvention};
use serde::Serialize;

pub const MAX_N: u64 = 100_000_000;
pub const MAX_SAMPLES: u64 = 1_000_000_000;

#[derive(Debug, Parser)]
#[command(name = "modpois", version, about = "Mod-Poisson models for the number of prime divisors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact mod-Poisson ratios of every model on an x grid.
    Ratios(Options),
    /// Monte Carlo generating functions of the pathwise sampler.
    Sample(Options),
    /// Run the oracle checks and print a JSON verdict.
    Verify(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    Lemma,
    Paper,
}

impl From<ConventionArg> for IndexConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Lemma => IndexConvention::LemmaWeights,
            ConventionArg::Paper => IndexConvention::PaperLiteral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingArg {
    SizeBias,
    Iid,
}

impl From<CouplingArg> for Coupling {
    fn from(c: CouplingArg) -> Self {
        match c {
            CouplingArg::SizeBias => Coupling::IteratedSizeBias,
            CouplingArg::Iid => Coupling::IidPaintbox,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    /// Evaluation point; repeat for a grid.
    #[arg(long = "x", default_values_t = [0.5, 1.0, 1.5, 2.0])]
    pub x: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Lemma)]
    pub convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = CouplingArg::SizeBias)]
    pub coupling: CouplingArg,
    /// Tail mass dropped when truncating Poisson laws.
    #[arg(long, default_value_t = 1e-14)]
    pub eps: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Replace every tolerance of `verify`.
    #[arg(long)]
    pub tolerance_override: Option<f64>,
    /// Allow n above 10^8 or more than 10^9 samples.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Ratios,
    Sample,
    Verify,
}

/// Validated settings of one run. Serialised into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: u64,
    pub x_grid: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub convention: IndexConvention,
    pub coupling: Coupling,
    pub eps: f64,
    pub output_path: Option<String>,
    pub format: Format,
    pub tolerance_override: Option<f64>,
}

/// Invalid command line values; reported with exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl RunConfig {
    pub fn from_options(command: CommandKind, o: &Options) -> Result<RunConfig, UsageError> {
        if !o.force && o.n > MAX_N {
            return Err(UsageError(format!("n = {} exceeds 10^8; pass --force to run anyway", o.n)));
        }
        if !o.force && o.samples > MAX_SAMPLES {
            return Err(UsageError(format!(
                "{} samples exceed 10^9; pass --force to run anyway",
                o.samples
            )));
        }
        if let Some(x) = o.x.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(UsageError(format!("x values must be finite and nonnegative, got {x}")));
        }
        if !(o.eps > 0.0 && o.eps < 1.0) {
            return Err(UsageError(format!("eps must lie in (0, 1), got {}", o.eps)));
        }
        if o.tolerance_override.is_some_and(|t| !(t >= 0.0)) {
            return Err(UsageError("tolerance override must be nonnegative".into()));
        }
        Ok(RunConfig {
            command,
            n: o.n,
            x_grid: o.x.clone(),
            samples: o.samples,
            seed: o.seed,
            convention: o.convention.into(),
            coupling: o.coupling.into(),
            eps: o.eps,
            output_path: o.out.as_ref().map(|p| p.display().to_string()),
            format: o.format,
            tolerance_override: o.tolerance_override,
        })
    }
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig, UsageError> {
        match &self.command {
            Command::Ratios(o) => RunConfig::from_options(CommandKind::Ratios, o),
            Command::Sample(o) => RunConfig::from_options(CommandKind::Sample, o),
            Command::Verify(o) => RunConfig::from_options(CommandKind::Verify, o),
        }
    }
}
