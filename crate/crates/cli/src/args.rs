use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Pre-transformed polar / RM codes: construction, exact weight spectra and
/// minimum-weight-reducing pre-transform design.
///
/// Exit codes: 0 success, 1 other failure or `--check` mismatch, 2 usage error,
/// 3 enumeration capacity exceeded, 4 design precondition or feasibility failure.
#[derive(Debug, Parser)]
#[command(name = "ptpolar", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a code (and optionally a pre-transform file) and print it.
    Construct(ConstructArgs),
    /// Enumerate the exact weight spectrum of U·T·H_N.
    ///
    /// CSV output has a `weight,count` header followed by one row per weight with a
    /// positive count, ascending.
    Spectrum(SpectrumArgs),
    /// Design a pre-transform that lowers the number of minimum-weight codewords.
    Design(DesignArgs),
    /// Check that a pre-transform does not lower the minimum distance.
    Verify(VerifyArgs),
    /// Reproduce the RM(32,16) pattern-count and N_min tables.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Rm,
    Polar,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKindArg {
    Identity,
    Custom,
    Pac,
    Crc,
    Pc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Weight-2 combination of the given `--columns`.
    #[value(alias = "fixed")]
    Theorem2,
    /// Search over frozen-row combinations of weight up to `--p`.
    #[value(alias = "search")]
    Theorem3,
}

#[derive(Debug, Clone, Args)]
pub struct CodeArgs {
    /// Information-set rule.
    #[arg(long, value_enum, default_value = "rm")]
    pub family: FamilyArg,
    /// Kronecker exponent (N = 2^n).
    #[arg(long)]
    pub n: Option<u32>,
    /// Dimension K.
    #[arg(long)]
    pub k: Option<usize>,
    /// BEC erasure probability for the polar rule.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Comma-separated 1-based information indices (custom family).
    #[arg(long, value_delimiter = ',')]
    pub info: Vec<usize>,
    /// Read the code from a JSON document instead.
    #[arg(long, conflicts_with_all = ["n", "k", "info"])]
    pub spec_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// Load the pre-transform from a JSON document.
    #[arg(long, conflicts_with = "t_kind")]
    pub t_file: Option<PathBuf>,
    /// Build the pre-transform from parameters.
    #[arg(long, value_enum)]
    pub t_kind: Option<TransformKindArg>,
    /// Custom entries as `row:col` pairs, e.g. `8:17,8:18`.
    #[arg(long, value_delimiter = ',')]
    pub entries: Vec<String>,
    /// Polynomial bits: PAC coefficients c_0..c_d, or the CRC generator MSB first (e.g. `1011`).
    #[arg(long)]
    pub poly: Option<String>,
    /// Parity equations `target=src+src;...`, e.g. `17=8+12;18=8`.
    #[arg(long)]
    pub pc: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EnumArgs {
    /// Override the largest K enumerated exhaustively.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Worker threads for enumeration.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub transform: TransformArgs,
    /// Write the pre-transform document here.
    #[arg(long)]
    pub t_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub transform: TransformArgs,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value = "theorem2")]
    pub method: MethodArg,
    /// Frozen columns combined by the fixed-column design.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<usize>,
    /// Largest combination weight for the search.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Largest number of frozen rows combined by the search.
    #[arg(long, default_value_t = ptpolar_core::design::DEFAULT_MAX_COMBO_SIZE)]
    pub budget: usize,
    /// Restrict the search to these frozen columns.
    #[arg(long, value_delimiter = ',')]
    pub restrict: Vec<usize>,
    /// Write the designed pre-transform document here.
    #[arg(long)]
    pub t_out: Option<PathBuf>,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub transform: TransformArgs,
    /// Also test this many random upper-unitriangular transforms.
    #[arg(long, default_value_t = 0)]
    pub random_trials: usize,
    /// Off-diagonal density of the random transforms.
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Exit nonzero if any reproduced value differs from the expected one.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}
