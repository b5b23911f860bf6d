//! Observable attributes of one software sample and the per-actor
//! aggregates derived from a corpus.

use serde::{Deserialize, Serialize};

/// One software sample.
///
/// Every attribute other than the identifier may be absent; absent values
/// are resolved by the missing-data policy during assessment rather than
/// here.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SoftwareRecord {
    pub software_id: String,
    #[serde(default)]
    pub developer_ids: Vec<String>,
    #[serde(default)]
    pub publisher_ids: Vec<String>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub language: Option<String>,
    /// Normalized release cadence in `(0, 1]`.
    #[serde(default)]
    pub update_frequency: Option<f64>,
    #[serde(default)]
    pub forks: Option<u64>,
    #[serde(default)]
    pub downloads: Option<u64>,
    #[serde(default)]
    pub vulnerabilities_unresolved: Option<u64>,
    /// All known vulnerabilities, resolved or not.
    #[serde(default)]
    pub vulnerabilities_total: Option<u64>,
    #[serde(default)]
    pub dependency_count: Option<u64>,
    /// Star count.
    #[serde(default)]
    pub rating_count: Option<u64>,
    /// Fraction of code exercised by tests, in `[0, 1]`.
    #[serde(default)]
    pub code_coverage: Option<f64>,
    /// Context weight; must be one of the configured context classes.
    #[serde(default)]
    pub context: Option<f64>,
    /// Lines of code.
    #[serde(default)]
    pub code_length: Option<u64>,
}

impl SoftwareRecord {
    pub fn new(software_id: impl Into<String>) -> Self {
        Self {
            software_id: software_id.into(),
            ..Self::default()
        }
    }

    /// Resolved vulnerabilities, `total - unresolved`. `None` when either
    /// count is absent or the pair is inconsistent.
    pub fn vulnerabilities_resolved(&self) -> Option<u64> {
        let total = self.vulnerabilities_total?;
        let unresolved = self.vulnerabilities_unresolved?;
        total.checked_sub(unresolved)
    }
}

/// Aggregated track record of one developer, scoped to the language of the
/// software being assessed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DeveloperHistory {
    pub developer_id: String,
    /// Known vulnerabilities summed over the developer's software.
    pub total_vulnerabilities: u64,
    pub software_count: u64,
    pub software_count_same_language: u64,
    pub years_in_language: u64,
    pub years_total: u64,
}

impl DeveloperHistory {
    /// Returns a description of each violated invariant.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.software_count_same_language > self.software_count {
            problems.push(format!(
                "developer {}: same-language software count {} exceeds total {}",
                self.developer_id, self.software_count_same_language, self.software_count
            ));
        }
        if self.years_in_language > self.years_total {
            problems.push(format!(
                "developer {}: years in language {} exceeds total years {}",
                self.developer_id, self.years_in_language, self.years_total
            ));
        }
        problems
    }
}

/// Aggregated track record of one publisher.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PublisherHistory {
    pub publisher_id: String,
    pub published_count: u64,
    pub years_publishing: u64,
}

impl PublisherHistory {
    /// A publisher with nothing published yet.
    pub fn is_new(&self) -> bool {
        self.published_count == 0
    }
}
