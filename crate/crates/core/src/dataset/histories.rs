//! Per-actor histories aggregated from a corpus, optionally overridden by a
//! side-table.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::corpus::{to_record, CorpusRow};
use crate::domain::{DeveloperHistory, PublisherHistory, SoftwareRecord};
use crate::error::CorpusError;
use crate::scoring::SegmentInputs;

/// How histories are derived from corpus rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryDerivationRule {
    /// Rows dated after this year are not part of anyone's history yet.
    pub current_year: i32,
    pub case_insensitive_language: bool,
}

impl Default for HistoryDerivationRule {
    fn default() -> Self {
        Self {
            current_year: i32::MAX,
            case_insensitive_language: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct YearSpan {
    min: Option<i32>,
    max: Option<i32>,
}

impl YearSpan {
    fn add(&mut self, year: Option<i32>) {
        if let Some(y) = year {
            self.min = Some(self.min.map_or(y, |m| m.min(y)));
            self.max = Some(self.max.map_or(y, |m| m.max(y)));
        }
    }

    /// Inclusive count of years, `max - min + 1`; 0 without dated rows.
    fn years(&self) -> u64 {
        match (self.min, self.max) {
            (Some(lo), Some(hi)) => (hi - lo) as u64 + 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct LanguageTally {
    software: u64,
    span: YearSpan,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct DeveloperTally {
    vulnerabilities: u64,
    software: u64,
    span: YearSpan,
    languages: BTreeMap<String, LanguageTally>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct PublisherTally {
    published: u64,
    span: YearSpan,
}

/// Histories for every developer and publisher seen in a corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActorHistories {
    rule: HistoryDerivationRule,
    developers: BTreeMap<String, DeveloperTally>,
    publishers: BTreeMap<String, PublisherTally>,
    developer_overrides: BTreeMap<String, DeveloperHistory>,
    publisher_overrides: BTreeMap<String, PublisherHistory>,
}

/// Aggregates histories from the rows that parse; rows with type errors are
/// skipped.
pub fn derive_histories(corpus: &[CorpusRow], rule: HistoryDerivationRule) -> ActorHistories {
    let records: Vec<SoftwareRecord> = corpus.iter().filter_map(|r| to_record(r).ok()).collect();
    ActorHistories::from_records(&records, rule)
}

impl ActorHistories {
    pub fn from_records(records: &[SoftwareRecord], rule: HistoryDerivationRule) -> Self {
        let mut out = Self {
            rule,
            ..Self::default()
        };
        for record in records {
            if record.year.is_some_and(|y| y > rule.current_year) {
                continue;
            }
            let vulns = record.vulnerabilities_total.unwrap_or(0);
            let language = record.language.as_deref().map(|l| out.language_key(l));
            for id in unique(&record.developer_ids) {
                let tally = out.developers.entry(id.to_owned()).or_default();
                tally.vulnerabilities += vulns;
                tally.software += 1;
                tally.span.add(record.year);
                if let Some(lang) = &language {
                    let per = tally.languages.entry(lang.clone()).or_default();
                    per.software += 1;
                    per.span.add(record.year);
                }
            }
            for id in unique(&record.publisher_ids) {
                let tally = out.publishers.entry(id.to_owned()).or_default();
                tally.published += 1;
                tally.span.add(record.year);
            }
        }
        out
    }

    pub fn rule(&self) -> HistoryDerivationRule {
        self.rule
    }

    fn language_key(&self, language: &str) -> String {
        let trimmed = language.trim();
        if self.rule.case_insensitive_language {
            trimmed.to_lowercase()
        } else {
            trimmed.to_owned()
        }
    }

    /// History of `developer_id` scoped to `language`. Side-table entries take
    /// precedence over derived ones.
    pub fn developer(
        &self,
        developer_id: &str,
        language: Option<&str>,
    ) -> Option<DeveloperHistory> {
        if let Some(fixed) = self.developer_overrides.get(developer_id) {
            return Some(fixed.clone());
        }
        let tally = self.developers.get(developer_id)?;
        let in_language = language
            .map(|l| self.language_key(l))
            .and_then(|key| tally.languages.get(&key));
        Some(DeveloperHistory {
            developer_id: developer_id.to_owned(),
            total_vulnerabilities: tally.vulnerabilities,
            software_count: tally.software,
            software_count_same_language: in_language.map_or(0, |l| l.software),
            years_in_language: in_language.map_or(0, |l| l.span.years()),
            years_total: tally.span.years(),
        })
    }

    pub fn publisher(&self, publisher_id: &str) -> Option<PublisherHistory> {
        if let Some(fixed) = self.publisher_overrides.get(publisher_id) {
            return Some(fixed.clone());
        }
        let tally = self.publishers.get(publisher_id)?;
        Some(PublisherHistory {
            publisher_id: publisher_id.to_owned(),
            published_count: tally.published,
            years_publishing: tally.span.years(),
        })
    }

    /// Replaces derived histories with the side-table's entries.
    pub fn apply_side_table(&mut self, table: SideTable) {
        self.developer_overrides.extend(
            table
                .developers
                .into_iter()
                .map(|h| (h.developer_id.clone(), h)),
        );
        self.publisher_overrides.extend(
            table
                .publishers
                .into_iter()
                .map(|h| (h.publisher_id.clone(), h)),
        );
    }

    /// Bundles a record with the histories of its listed actors. Actors with
    /// no history are left out; the missing-data policy handles them.
    pub fn inputs_for(&self, record: &SoftwareRecord) -> SegmentInputs {
        let language = record.language.as_deref();
        SegmentInputs {
            developer_histories: unique(&record.developer_ids)
                .filter_map(|id| self.developer(id, language))
                .collect(),
            publisher_histories: unique(&record.publisher_ids)
                .filter_map(|id| self.publisher(id))
                .collect(),
            record: record.clone(),
        }
    }

    pub fn developer_ids(&self) -> impl Iterator<Item = &str> {
        self.developers
            .keys()
            .chain(self.developer_overrides.keys())
            .map(String::as_str)
            .collect::<BTreeSet<_>>()
            .into_iter()
    }

    pub fn publisher_ids(&self) -> impl Iterator<Item = &str> {
        self.publishers
            .keys()
            .chain(self.publisher_overrides.keys())
            .map(String::as_str)
            .collect::<BTreeSet<_>>()
            .into_iter()
    }
}

fn unique(ids: &[String]) -> impl Iterator<Item = &str> {
    let mut seen = BTreeSet::new();
    ids.iter()
        .map(String::as_str)
        .filter(move |id| seen.insert(*id))
}

/// Actor histories supplied directly instead of derived.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SideTable {
    pub developers: Vec<DeveloperHistory>,
    pub publishers: Vec<PublisherHistory>,
}

pub const SIDE_TABLE_HEADER: [&str; 9] = [
    "actor_id",
    "kind",
    "total_vulnerabilities",
    "software_count",
    "software_count_same_language",
    "years_in_language",
    "years_total",
    "published_count",
    "years_publishing",
];

/// Parses a history side-table. Columns that do not apply to a row's kind
/// are ignored; blank applicable cells read as 0.
pub fn parse_side_table<R: Read>(input: R) -> Result<SideTable, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if found != SIDE_TABLE_HEADER {
        return Err(CorpusError::SideTable(format!(
            "expected header [{}], found [{}]",
            SIDE_TABLE_HEADER.join(", "),
            found.join(", ")
        )));
    }

    let mut table = SideTable::default();
    for result in reader.records() {
        let rec = result?;
        let line = rec.position().map_or(0, |p| p.line());
        let count = |i: usize| -> Result<u64, CorpusError> {
            let cell = rec.get(i).unwrap_or("");
            if cell.is_empty() {
                return Ok(0);
            }
            cell.parse().map_err(|_| {
                CorpusError::SideTable(format!(
                    "line {line}: `{}` is not a nonnegative integer in column {}",
                    cell, SIDE_TABLE_HEADER[i]
                ))
            })
        };
        let id = rec.get(0).unwrap_or("").to_owned();
        if id.is_empty() {
            return Err(CorpusError::SideTable(format!(
                "line {line}: empty actor_id"
            )));
        }
        match rec.get(1).unwrap_or("") {
            "developer" => {
                let h = DeveloperHistory {
                    developer_id: id,
                    total_vulnerabilities: count(2)?,
                    software_count: count(3)?,
                    software_count_same_language: count(4)?,
                    years_in_language: count(5)?,
                    years_total: count(6)?,
                };
                if let Some(problem) = h.check().into_iter().next() {
                    return Err(CorpusError::SideTable(format!("line {line}: {problem}")));
                }
                table.developers.push(h);
            }
            "publisher" => table.publishers.push(PublisherHistory {
                publisher_id: id,
                published_count: count(7)?,
                years_publishing: count(8)?,
            }),
            other => {
                return Err(CorpusError::SideTable(format!(
                    "line {line}: kind must be `developer` or `publisher`, got `{other}`"
                )))
            }
        }
    }
    Ok(table)
}
