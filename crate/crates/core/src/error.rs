use thiserror::Error;

use crate::domain::{Segment, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("dependency sensitivity must be a nonnegative number, got {0}")]
    Sensitivity(f64),
    #[error("context table is empty")]
    EmptyContextTable,
    #[error("context class `{label}` has weight {weight}, expected a value in (0, 1]")]
    ContextWeightOutOfRange { label: String, weight: f64 },
    #[error("context weights sum to {0}, expected 1")]
    ContextTableSum(f64),
    #[error("band thresholds {0:?} must be strictly increasing inside (0, 1)")]
    BandThresholds([f64; 3]),
    #[error("penalty threshold {0} is outside [0, 1]")]
    PenaltyThreshold(f64),
    #[error("sigmoid constants must be finite (shift {shift}, scale {scale})")]
    Sigmoid { shift: f64, scale: f64 },
    #[error("weight overrides {0:?} must be finite and nonnegative")]
    NegativeWeight([f64; 3]),
    #[error("weight overrides sum to {0}, expected 1")]
    WeightSum(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessError {
    #[error("record `{software_id}` failed validation: {}", join(violations))]
    Invalid {
        software_id: String,
        violations: Vec<Violation>,
    },
    #[error("the {0} segment cannot be evaluated and max-risk defaulting is disabled")]
    Unevaluable(Segment),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus header does not match the schema: expected [{expected}], found [{found}]")]
    Schema { expected: String, found: String },
    #[error("history side-table: {0}")]
    SideTable(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(
        "snapshot parse error at `{path}` (line {line}, column {column}, byte {offset}): {message}"
    )]
    Parse {
        path: String,
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },
    #[error("snapshot `{0}` has an empty identifier")]
    EmptyIdentifier(String),
    #[error("unknown context label `{label}`; configured: {known}")]
    UnknownContext { label: String, known: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("unknown sweep parameter `{name}`; sweepable: {known}")]
    UnknownParameter { name: String, known: String },
    #[error("unknown output quantity `{name}`; available: {known}")]
    UnknownQuantity { name: String, known: String },
    #[error("axis `{name}`: {reason}")]
    InvalidAxis { name: String, reason: String },
    #[error("both axes sweep `{0}`")]
    SameParameter(String),
    #[error("malformed grid: {0}")]
    Malformed(String),
    #[error(transparent)]
    Assess(#[from] AssessError),
}
