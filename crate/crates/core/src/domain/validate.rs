//! Record validation. Violations are returned as data, in field order.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::AssessmentConfig;
use super::record::SoftwareRecord;

/// A record attribute, named after its corpus column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Sample,
    CodeLength,
    Developer,
    Publisher,
    Year,
    Language,
    UpdateFrequency,
    Forks,
    Downloads,
    UnresolvedVulnerabilities,
    KnownVulnerabilities,
    Dependencies,
    Rating,
    CodeCoverage,
    Context,
}

impl Field {
    /// Corpus column order.
    pub const ALL: [Field; 15] = [
        Field::Sample,
        Field::CodeLength,
        Field::Developer,
        Field::Publisher,
        Field::Year,
        Field::Language,
        Field::UpdateFrequency,
        Field::Forks,
        Field::Downloads,
        Field::UnresolvedVulnerabilities,
        Field::KnownVulnerabilities,
        Field::Dependencies,
        Field::Rating,
        Field::CodeCoverage,
        Field::Context,
    ];

    /// Exact corpus header text.
    pub fn column(self) -> &'static str {
        match self {
            Field::Sample => "Sample",
            Field::CodeLength => "Code Length",
            Field::Developer => "Developer",
            Field::Publisher => "Publisher",
            Field::Year => "Year",
            Field::Language => "Language",
            Field::UpdateFrequency => "Update Frequency",
            Field::Forks => "Forks",
            Field::Downloads => "Downloads",
            Field::UnresolvedVulnerabilities => "Unresolved Vulnerabilities",
            Field::KnownVulnerabilities => "Known Vulnerabilities",
            Field::Dependencies => "Dependencies",
            Field::Rating => "Rating",
            Field::CodeCoverage => "Code Coverage",
            Field::Context => "Context",
        }
    }

    /// Short lowercase name used in messages.
    pub fn noun(self) -> &'static str {
        match self {
            Field::Sample => "sample",
            Field::CodeLength => "code length",
            Field::Developer => "developer",
            Field::Publisher => "publisher",
            Field::Year => "year",
            Field::Language => "language",
            Field::UpdateFrequency => "update frequency",
            Field::Forks => "forks",
            Field::Downloads => "downloads",
            Field::UnresolvedVulnerabilities => "unresolved vulnerabilities",
            Field::KnownVulnerabilities => "known vulnerabilities",
            Field::Dependencies => "dependencies",
            Field::Rating => "rating",
            Field::CodeCoverage => "coverage",
            Field::Context => "context",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    /// The record cannot be assessed.
    Hard,
    /// A value is absent; the missing-data policy will cover it.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    Missing,
    NotAnInteger { text: String },
    NotANumber { text: String },
    Negative { text: String },
    CoverageOutOfRange { value: f64 },
    UpdateFrequencyOutOfRange { value: f64 },
    UnknownContext { value: f64 },
    ZeroCodeLength,
    UnresolvedExceedsTotal { unresolved: u64, total: u64 },
    RatingExceedsDownloads { rating: u64, downloads: u64 },
    EmptyIdentifier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: Field,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

impl Violation {
    pub fn new(field: Field, kind: ViolationKind) -> Self {
        Self { field, kind }
    }

    pub fn severity(&self) -> Severity {
        match self.kind {
            ViolationKind::Missing => Severity::Soft,
            _ => Severity::Hard,
        }
    }

    pub fn is_hard(&self) -> bool {
        self.severity() == Severity::Hard
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let noun = self.field.noun();
        match &self.kind {
            ViolationKind::Missing => write!(f, "missing {noun}"),
            ViolationKind::NotAnInteger { text } => write!(f, "non-integer {noun}: `{text}`"),
            ViolationKind::NotANumber { text } => write!(f, "unparseable {noun}: `{text}`"),
            ViolationKind::Negative { text } => write!(f, "negative {noun}: `{text}`"),
            ViolationKind::CoverageOutOfRange { value } => {
                write!(f, "coverage out of range: {value} not in [0, 1]")
            }
            ViolationKind::UpdateFrequencyOutOfRange { value } => {
                write!(f, "update frequency out of range: {value} not in (0, 1]")
            }
            ViolationKind::UnknownContext { value } => {
                write!(
                    f,
                    "unknown context: {value} is not a configured context class"
                )
            }
            ViolationKind::ZeroCodeLength => write!(f, "code length must be positive"),
            ViolationKind::UnresolvedExceedsTotal { unresolved, total } => write!(
                f,
                "unresolved vulnerabilities {unresolved} exceed known vulnerabilities {total}"
            ),
            ViolationKind::RatingExceedsDownloads { rating, downloads } => {
                write!(f, "rating {rating} exceeds downloads {downloads}")
            }
            ViolationKind::EmptyIdentifier => write!(f, "empty {noun} identifier"),
        }
    }
}

/// Outcome of [`validate_record`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    /// No hard errors. Soft gaps are allowed.
    pub fn is_ok(&self) -> bool {
        !self.violations.iter().any(Violation::is_hard)
    }

    pub fn hard(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.is_hard())
    }

    pub fn soft(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| !v.is_hard())
    }
}

/// Checks every record invariant. Pure; the violation order follows corpus
/// column order.
pub fn validate_record(record: &SoftwareRecord, config: &AssessmentConfig) -> Validation {
    use ViolationKind as K;

    let mut out = Vec::new();
    let mut push = |field, kind| out.push(Violation::new(field, kind));

    if record.software_id.trim().is_empty() {
        push(Field::Sample, K::EmptyIdentifier);
    }
    match record.code_length {
        None => push(Field::CodeLength, K::Missing),
        Some(0) => push(Field::CodeLength, K::ZeroCodeLength),
        Some(_) => {}
    }
    actor_list(&record.developer_ids, Field::Developer, &mut push);
    actor_list(&record.publisher_ids, Field::Publisher, &mut push);
    if record.year.is_none() {
        push(Field::Year, K::Missing);
    }
    if record
        .language
        .as_deref()
        .is_none_or(|l| l.trim().is_empty())
    {
        push(Field::Language, K::Missing);
    }
    match record.update_frequency {
        None => push(Field::UpdateFrequency, K::Missing),
        Some(v) if !(v > 0.0 && v <= 1.0) => push(
            Field::UpdateFrequency,
            K::UpdateFrequencyOutOfRange { value: v },
        ),
        Some(_) => {}
    }
    if record.forks.is_none() {
        push(Field::Forks, K::Missing);
    }
    if record.downloads.is_none() {
        push(Field::Downloads, K::Missing);
    }
    match (
        record.vulnerabilities_unresolved,
        record.vulnerabilities_total,
    ) {
        (Some(unresolved), Some(total)) if unresolved > total => push(
            Field::UnresolvedVulnerabilities,
            K::UnresolvedExceedsTotal { unresolved, total },
        ),
        (u, t) => {
            if u.is_none() {
                push(Field::UnresolvedVulnerabilities, K::Missing);
            }
            if t.is_none() {
                push(Field::KnownVulnerabilities, K::Missing);
            }
        }
    }
    if record.dependency_count.is_none() {
        push(Field::Dependencies, K::Missing);
    }
    match (record.rating_count, record.downloads) {
        (Some(rating), Some(downloads)) if rating > downloads => push(
            Field::Rating,
            K::RatingExceedsDownloads { rating, downloads },
        ),
        (None, _) => push(Field::Rating, K::Missing),
        _ => {}
    }
    match record.code_coverage {
        None => push(Field::CodeCoverage, K::Missing),
        Some(v) if !(0.0..=1.0).contains(&v) => {
            push(Field::CodeCoverage, K::CoverageOutOfRange { value: v })
        }
        Some(_) => {}
    }
    match record.context {
        None => push(Field::Context, K::Missing),
        Some(v) if !config.context_table.contains_weight(v) => {
            push(Field::Context, K::UnknownContext { value: v })
        }
        Some(_) => {}
    }

    Validation { violations: out }
}

fn actor_list(ids: &[String], field: Field, push: &mut impl FnMut(Field, ViolationKind)) {
    if ids.is_empty() {
        push(field, ViolationKind::Missing);
    } else if ids.iter().any(|id| id.trim().is_empty()) {
        push(field, ViolationKind::EmptyIdentifier);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn reference_record() -> SoftwareRecord {
        SoftwareRecord {
            software_id: "reference".into(),
            developer_ids: vec!["W".into()],
            publisher_ids: vec!["Z".into()],
            year: Some(2018),
            language: Some("Java".into()),
            update_frequency: Some(0.08424),
            forks: Some(2003),
            downloads: Some(20455),
            vulnerabilities_unresolved: Some(135),
            vulnerabilities_total: Some(7556),
            dependency_count: Some(28),
            rating_count: Some(7153),
            code_coverage: Some(0.99),
            context: Some(0.2),
            code_length: Some(304),
        }
    }

    fn kinds(v: &Validation) -> Vec<(Field, String)> {
        v.violations
            .iter()
            .map(|v| (v.field, v.to_string()))
            .collect()
    }

    #[test]
    fn reference_sample_is_valid() {
        let v = validate_record(&reference_record(), &AssessmentConfig::default());
        assert!(v.violations.is_empty(), "{:?}", v);
        assert!(v.is_ok());
    }

    #[test]
    fn coverage_above_one_is_hard() {
        let mut r = reference_record();
        r.code_coverage = Some(1.3);
        let v = validate_record(&r, &AssessmentConfig::default());
        assert!(!v.is_ok());
        let hard: Vec<_> = v.hard().collect();
        assert_eq!(hard.len(), 1);
        assert_eq!(hard[0].field, Field::CodeCoverage);
        assert!(hard[0].to_string().starts_with("coverage out of range"));
    }

    #[test]
    fn unlisted_context_is_hard() {
        let mut r = reference_record();
        r.context = Some(0.4);
        let v = validate_record(&r, &AssessmentConfig::default());
        let hard: Vec<_> = v.hard().collect();
        assert_eq!(hard.len(), 1);
        assert!(hard[0].to_string().starts_with("unknown context"));
    }

    #[test]
    fn missing_values_are_soft() {
        let mut r = reference_record();
        r.dependency_count = None;
        r.forks = None;
        r.language = None;
        let v = validate_record(&r, &AssessmentConfig::default());
        assert!(v.is_ok());
        assert_eq!(
            v.soft().map(|v| v.field).collect::<Vec<_>>(),
            vec![Field::Language, Field::Forks, Field::Dependencies]
        );
    }

    #[test]
    fn cross_field_invariants() {
        let mut r = reference_record();
        r.vulnerabilities_unresolved = Some(8000);
        r.rating_count = Some(30000);
        r.update_frequency = Some(0.0);
        r.code_length = Some(0);
        let v = validate_record(&r, &AssessmentConfig::default());
        assert_eq!(
            v.hard().map(|v| v.field).collect::<Vec<_>>(),
            vec![
                Field::CodeLength,
                Field::UpdateFrequency,
                Field::UnresolvedVulnerabilities,
                Field::Rating
            ]
        );
    }

    #[test]
    fn validation_is_deterministic() {
        let mut r = SoftwareRecord::new("");
        r.code_coverage = Some(-0.1);
        let a = validate_record(&r, &AssessmentConfig::default());
        let b = validate_record(&r, &AssessmentConfig::default());
        assert_eq!(kinds(&a), kinds(&b));
        assert_eq!(a.violations[0].field, Field::Sample);
    }

    #[test]
    fn custom_context_table_is_honored() {
        let mut config = AssessmentConfig::default();
        config.context_table =
            super::super::config::ContextTable::new([("a".into(), 0.4), ("b".into(), 0.6)]);
        let mut r = reference_record();
        r.context = Some(0.4);
        assert!(validate_record(&r, &config).is_ok());
        r.context = Some(0.2);
        assert!(!validate_record(&r, &config).is_ok());
    }
}
