//! Comma-separated corpus in the 15-column dataset layout.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::domain::{Field, SoftwareRecord, Violation, ViolationKind};
use crate::error::CorpusError;

/// One data line of a corpus, cells kept as text. Blank cells are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusRow {
    /// 1-based line number in the source file (0 for generated rows).
    pub line: u64,
    cells: [Option<String>; 15],
}

impl CorpusRow {
    pub fn new(line: u64) -> Self {
        Self {
            line,
            cells: Default::default(),
        }
    }

    pub fn get(&self, field: Field) -> Option<&str> {
        self.cells[field.index()].as_deref()
    }

    pub fn set(&mut self, field: Field, value: impl Into<String>) {
        let value = value.into();
        self.cells[field.index()] = if value.trim().is_empty() {
            None
        } else {
            Some(value)
        };
    }

    pub fn clear(&mut self, field: Field) {
        self.cells[field.index()] = None;
    }

    pub fn cells(&self) -> impl Iterator<Item = Option<&str>> {
        self.cells.iter().map(Option::as_deref)
    }

    /// Identifier used when the Sample cell is blank.
    pub fn fallback_id(&self) -> String {
        format!("line-{}", self.line)
    }
}

/// Why a data line could not be used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum RowProblem {
    /// The line itself is malformed (wrong cell count, bad encoding).
    Structure { message: String },
    /// One or more cells break a record invariant.
    Invalid { violations: Vec<Violation> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub sample: Option<String>,
    #[serde(flatten)]
    pub problem: RowProblem,
}

impl RowError {
    pub fn invalid(row: &CorpusRow, violations: Vec<Violation>) -> Self {
        Self {
            line: row.line,
            sample: row.get(Field::Sample).map(str::to_owned),
            problem: RowProblem::Invalid { violations },
        }
    }

    /// One message per problem.
    pub fn messages(&self) -> Vec<(Option<Field>, String)> {
        match &self.problem {
            RowProblem::Structure { message } => vec![(None, message.clone())],
            RowProblem::Invalid { violations } => violations
                .iter()
                .map(|v| (Some(v.field), v.to_string()))
                .collect(),
        }
    }
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}", self.line)?;
        if let Some(sample) = &self.sample {
            write!(f, " (sample {sample})")?;
        }
        let messages: Vec<String> = self.messages().into_iter().map(|(_, m)| m).collect();
        write!(f, ": {}", messages.join("; "))
    }
}

/// The exact header line.
pub fn header() -> Vec<&'static str> {
    Field::ALL.iter().map(|f| f.column()).collect()
}

/// Parses a corpus. A header mismatch aborts; every other problem is
/// reported per row, in input order.
pub fn parse_corpus<R: Read>(input: R) -> Result<Vec<Result<CorpusRow, RowError>>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let found: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let expected = header();
    if found != expected {
        return Err(CorpusError::Schema {
            expected: expected.join(", "),
            found: found.join(", "),
        });
    }

    let mut out = Vec::new();
    for result in reader.records() {
        let parsed = match result {
            Ok(record) => row_from_csv(&record),
            Err(e) => Err(RowError {
                line: e.position().map_or(0, |p| p.line()),
                sample: None,
                problem: RowProblem::Structure {
                    message: e.to_string(),
                },
            }),
        };
        out.push(parsed);
    }
    Ok(out)
}

fn row_from_csv(record: &csv::StringRecord) -> Result<CorpusRow, RowError> {
    let line = record.position().map_or(0, |p| p.line());
    if record.len() != Field::ALL.len() {
        return Err(RowError {
            line,
            sample: record.get(0).filter(|s| !s.is_empty()).map(str::to_owned),
            problem: RowProblem::Structure {
                message: format!(
                    "expected {} cells, found {}",
                    Field::ALL.len(),
                    record.len()
                ),
            },
        });
    }
    let mut row = CorpusRow::new(line);
    for (field, cell) in Field::ALL.iter().zip(record.iter()) {
        row.set(*field, cell);
    }
    to_record(&row).map_err(|violations| RowError::invalid(&row, violations))?;
    Ok(row)
}

/// Writes rows under the exact header. Cells holding commas are quoted.
pub fn write_corpus<W: Write>(rows: &[CorpusRow], output: W) -> Result<(), CorpusError> {
    let mut writer = csv::Writer::from_writer(output);
    writer.write_record(header())?;
    for row in rows {
        writer.write_record(row.cells().map(|c| c.unwrap_or("")))?;
    }
    writer.flush()?;
    Ok(())
}

/// Converts a row into a typed record. Absent cells stay absent; cells that
/// fail to parse are returned as hard violations. Range checks are left to
/// [`crate::domain::validate_record`].
pub fn to_record(row: &CorpusRow) -> Result<SoftwareRecord, Vec<Violation>> {
    let mut errors = Vec::new();
    let mut record = SoftwareRecord::new(
        row.get(Field::Sample)
            .map(str::to_owned)
            .unwrap_or_else(|| row.fallback_id()),
    );

    let mut int = |field| parse_count(row, field, &mut errors);
    record.code_length = int(Field::CodeLength);
    record.forks = int(Field::Forks);
    record.downloads = int(Field::Downloads);
    record.vulnerabilities_unresolved = int(Field::UnresolvedVulnerabilities);
    record.vulnerabilities_total = int(Field::KnownVulnerabilities);
    record.dependency_count = int(Field::Dependencies);
    record.rating_count = int(Field::Rating);

    record.developer_ids = actor_ids(row.get(Field::Developer));
    record.publisher_ids = actor_ids(row.get(Field::Publisher));
    record.language = row.get(Field::Language).map(str::to_owned);

    record.year = row
        .get(Field::Year)
        .and_then(|text| match text.parse::<i32>() {
            Ok(y) => Some(y),
            Err(_) => {
                errors.push(number_problem(Field::Year, text));
                None
            }
        });

    let mut real = |field| parse_real(row, field, &mut errors);
    record.update_frequency = real(Field::UpdateFrequency);
    record.code_coverage = real(Field::CodeCoverage);
    record.context = real(Field::Context);

    if errors.is_empty() {
        Ok(record)
    } else {
        errors.sort_by_key(|v| v.field);
        Err(errors)
    }
}

/// Splits a multi-actor cell such as `3,5,10`.
pub fn actor_ids(cell: Option<&str>) -> Vec<String> {
    cell.map(|c| {
        c.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect()
    })
    .unwrap_or_default()
}

fn parse_count(row: &CorpusRow, field: Field, errors: &mut Vec<Violation>) -> Option<u64> {
    let text = row.get(field)?;
    match text.parse::<u64>() {
        Ok(v) => Some(v),
        Err(_) => {
            errors.push(number_problem(field, text));
            None
        }
    }
}

fn parse_real(row: &CorpusRow, field: Field, errors: &mut Vec<Violation>) -> Option<f64> {
    let text = row.get(field)?;
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => {
            errors.push(Violation::new(
                field,
                ViolationKind::NotANumber { text: text.into() },
            ));
            None
        }
    }
}

fn number_problem(field: Field, text: &str) -> Violation {
    let kind = match text.parse::<f64>() {
        Ok(v) if v < 0.0 => ViolationKind::Negative { text: text.into() },
        Ok(v) if v.is_finite() => ViolationKind::NotAnInteger { text: text.into() },
        _ => ViolationKind::NotANumber { text: text.into() },
    };
    Violation::new(field, kind)
}
