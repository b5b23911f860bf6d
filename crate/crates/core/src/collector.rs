//! Normalization of recorded code-host and package-registry snapshots.
//!
//! A snapshot is one JSON file (see `docs/snapshot-format.md`). Every raw
//! field is optional; anything that cannot be filled is reported as a gap
//! and left absent so the missing-data policy decides how it scores.

use chrono::{DateTime, Datelike, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::domain::{ContextTable, Field, SoftwareRecord};
use crate::error::SnapshotError;

/// Update frequency floor: one release a year, expressed per day.
pub const MIN_UPDATE_FREQUENCY: f64 = 1.0 / 365.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    CodeHost,
    PackageRegistry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Advisory {
    pub id: String,
    #[serde(default)]
    pub resolved: bool,
}

/// Raw metadata as captured from the source.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawFields {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stars: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forks: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub downloads: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dependencies: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advisories: Option<Vec<Advisory>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub release_dates: Option<Vec<NaiveDate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primary_language: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contributors: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maintainers: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_length: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostSnapshot {
    pub source: SourceKind,
    pub identifier: String,
    pub captured_at: DateTime<Utc>,
    #[serde(default)]
    pub fields: RawFields,
}

impl HostSnapshot {
    /// Names of raw fields absent from the snapshot.
    pub fn gaps(&self) -> Vec<&'static str> {
        let f = &self.fields;
        [
            ("stars", f.stars.is_none()),
            ("forks", f.forks.is_none()),
            ("downloads", f.downloads.is_none()),
            ("dependencies", f.dependencies.is_none()),
            ("advisories", f.advisories.is_none()),
            ("release_dates", f.release_dates.is_none()),
            ("primary_language", f.primary_language.is_none()),
            ("contributors", f.contributors.is_none()),
            ("maintainers", f.maintainers.is_none()),
            ("code_length", f.code_length.is_none()),
            ("code_coverage", f.code_coverage.is_none()),
        ]
        .into_iter()
        .filter_map(|(name, absent)| absent.then_some(name))
        .collect()
    }

    fn check(&self) -> Result<(), SnapshotError> {
        if self.identifier.trim().is_empty() {
            return Err(SnapshotError::EmptyIdentifier(self.identifier.clone()));
        }
        Ok(())
    }
}

/// Parses a snapshot file, reporting the JSON path and position of the
/// first error.
pub fn load_snapshot(text: &str) -> Result<HostSnapshot, SnapshotError> {
    let parse_error = |path: String, e: &serde_json::Error| SnapshotError::Parse {
        path,
        line: e.line(),
        column: e.column(),
        offset: if e.is_eof() {
            text.len()
        } else {
            byte_offset(text, e.line(), e.column())
        },
        message: e.to_string(),
    };
    let mut de = serde_json::Deserializer::from_str(text);
    let snapshot: HostSnapshot = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| parse_error(e.path().to_string(), e.inner()))?;
    de.end().map_err(|e| parse_error(".".to_owned(), &e))?;
    snapshot.check()?;
    Ok(snapshot)
}

/// Converts a 1-based line and column into a byte offset, clamped to the
/// text length.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

/// A normalized record plus the record fields that could not be filled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    pub record: SoftwareRecord,
    pub gaps: Vec<Field>,
}

/// Maps a snapshot onto a record. `context` is a label from `table`.
pub fn normalize(
    snapshot: &HostSnapshot,
    context: &str,
    table: &ContextTable,
) -> Result<Normalized, SnapshotError> {
    snapshot.check()?;
    let weight = table
        .weight(context)
        .ok_or_else(|| SnapshotError::UnknownContext {
            label: context.to_owned(),
            known: table.iter().map(|(l, _)| l).collect::<Vec<_>>().join(", "),
        })?;
    let f = &snapshot.fields;
    let mut record = SoftwareRecord::new(snapshot.identifier.trim());
    record.context = Some(weight);
    record.developer_ids = unique_ids(f.contributors.as_deref());
    record.publisher_ids = unique_ids(f.maintainers.as_deref());
    record.forks = f.forks;
    record.downloads = f.downloads;
    record.rating_count = f.stars;
    record.code_length = f.code_length;
    record.code_coverage = f.code_coverage;
    record.language = f
        .primary_language
        .as_deref()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned);
    record.dependency_count = f.dependencies.as_ref().map(|d| d.len() as u64);
    if let Some(advisories) = &f.advisories {
        record.vulnerabilities_total = Some(advisories.len() as u64);
        record.vulnerabilities_unresolved =
            Some(advisories.iter().filter(|a| !a.resolved).count() as u64);
    }
    if let Some(dates) = &f.release_dates {
        record.update_frequency = Some(update_frequency(dates, snapshot.captured_at));
        record.year = dates.iter().min().map(|d| d.year());
    }
    let gaps = absent_fields(&record);
    Ok(Normalized { record, gaps })
}

/// Releases in the year up to `captured_at`, per month, clamped to
/// `[MIN_UPDATE_FREQUENCY, 1]`.
pub fn update_frequency(release_dates: &[NaiveDate], captured_at: DateTime<Utc>) -> f64 {
    let end = captured_at.date_naive();
    let start = end - Duration::days(365);
    let recent = release_dates
        .iter()
        .filter(|&&d| d > start && d <= end)
        .count();
    (recent as f64 / 12.0).clamp(MIN_UPDATE_FREQUENCY, 1.0)
}

fn unique_ids(ids: Option<&[String]>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for id in ids.unwrap_or_default() {
        let id = id.trim();
        if !id.is_empty() && !out.iter().any(|o| o == id) {
            out.push(id.to_owned());
        }
    }
    out
}

/// Record fields with no value, in column order.
pub fn absent_fields(record: &SoftwareRecord) -> Vec<Field> {
    Field::ALL
        .into_iter()
        .filter(|&field| match field {
            Field::Sample => record.software_id.is_empty(),
            Field::CodeLength => record.code_length.is_none(),
            Field::Developer => record.developer_ids.is_empty(),
            Field::Publisher => record.publisher_ids.is_empty(),
            Field::Year => record.year.is_none(),
            Field::Language => record.language.is_none(),
            Field::UpdateFrequency => record.update_frequency.is_none(),
            Field::Forks => record.forks.is_none(),
            Field::Downloads => record.downloads.is_none(),
            Field::UnresolvedVulnerabilities => record.vulnerabilities_unresolved.is_none(),
            Field::KnownVulnerabilities => record.vulnerabilities_total.is_none(),
            Field::Dependencies => record.dependency_count.is_none(),
            Field::Rating => record.rating_count.is_none(),
            Field::CodeCoverage => record.code_coverage.is_none(),
            Field::Context => record.context.is_none(),
        })
        .collect()
}
