use std::path::PathBuf;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Trust-based supply chain risk assessment.
///
/// Exit status: 0 success, 1 every row/record failed (or validation found
/// errors), 2 usage or configuration error.
#[derive(Debug, Parser)]
#[command(name = "trustrisk", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every row of a corpus and write a breakdown report.
    Assess(AssessArgs),
    /// Write a seeded synthetic corpus and its manifest.
    Generate(GenerateArgs),
    /// Sweep two parameters over a base record and write the output matrix.
    Grid(GridArgs),
    /// Check a corpus without scoring it, or run the robustness battery.
    Validate(ValidateArgs),
    /// Convert a host snapshot into a record.
    Normalize(NormalizeArgs),
    /// Normalize and score one or more host snapshots.
    SnapshotAssess(SnapshotAssessArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    /// Corpus CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Report path. Row errors go to `<output>.errors.csv`.
    #[arg(long)]
    pub output: PathBuf,
    /// Assessment config JSON; absent fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// History side-table CSV overriding derived histories.
    #[arg(long)]
    pub histories: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Timestamp stamped on every breakdown [default: input modification time].
    #[arg(long)]
    pub assessed_at: Option<DateTime<Utc>>,
    /// Rows dated after this year are left out of derived histories.
    #[arg(long)]
    pub current_year: Option<i32>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    /// Corpus path. The manifest goes to `<output>.manifest.json`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Grid spec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Base inputs JSON: a record plus developer and publisher histories.
    #[arg(long)]
    pub record: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Corpus CSV to check.
    #[arg(long, required_unless_present = "self_test")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the error listing here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run the six-case robustness battery instead of checking a file.
    #[arg(long, conflicts_with = "input")]
    pub self_test: bool,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Snapshot JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Context label from the config's context table.
    #[arg(long)]
    pub context: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Record JSON with its gap list.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SnapshotAssessArgs {
    /// Snapshot JSON files.
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    /// Context label applied to every snapshot.
    #[arg(long)]
    pub context: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// History side-table CSV.
    #[arg(long)]
    pub histories: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}
