//! Tunable parameters of an assessment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Tolerance used for every "sums to 1" check on configuration values.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Tolerance used when matching a numeric context against the table.
pub const CONTEXT_MATCH_TOLERANCE: f64 = 1e-9;

/// Software category weights used by the penalty. Smaller weights penalize
/// unresolved vulnerabilities harder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextTable(BTreeMap<String, f64>);

impl Default for ContextTable {
    fn default() -> Self {
        Self(BTreeMap::from([
            ("security".to_owned(), 0.2),
            ("automation".to_owned(), 0.3),
            ("other".to_owned(), 0.5),
        ]))
    }
}

impl ContextTable {
    pub fn new(classes: impl IntoIterator<Item = (String, f64)>) -> Self {
        Self(classes.into_iter().collect())
    }

    pub fn weight(&self, label: &str) -> Option<f64> {
        self.0.get(label).copied()
    }

    /// Label of the class whose weight equals `value`, if any.
    pub fn label_of(&self, value: f64) -> Option<&str> {
        self.0
            .iter()
            .find(|(_, w)| (**w - value).abs() <= CONTEXT_MATCH_TOLERANCE)
            .map(|(label, _)| label.as_str())
    }

    pub fn contains_weight(&self, value: f64) -> bool {
        self.label_of(value).is_some()
    }

    /// The most stringent class (smallest weight). Used when a record has no
    /// context: unknown software is treated like security software.
    pub fn most_stringent(&self) -> Option<(&str, f64)> {
        self.0
            .iter()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(label, w)| (label.as_str(), *w))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(label, w)| (label.as_str(), *w))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.0.is_empty() {
            return Err(ConfigError::EmptyContextTable);
        }
        for (label, &w) in &self.0 {
            if !(w > 0.0 && w <= 1.0) {
                return Err(ConfigError::ContextWeightOutOfRange {
                    label: label.clone(),
                    weight: w,
                });
            }
        }
        let sum: f64 = self.0.values().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(ConfigError::ContextTableSum(sum));
        }
        Ok(())
    }
}

/// Lower bounds of the Moderate, High and Critical bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BandThresholds {
    moderate: f64,
    high: f64,
    critical: f64,
}

impl BandThresholds {
    pub fn new(moderate: f64, high: f64, critical: f64) -> Result<Self, ConfigError> {
        let ordered = 0.0 < moderate && moderate < high && high < critical && critical < 1.0;
        if !ordered {
            return Err(ConfigError::BandThresholds([moderate, high, critical]));
        }
        Ok(Self {
            moderate,
            high,
            critical,
        })
    }

    pub fn moderate(&self) -> f64 {
        self.moderate
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn critical(&self) -> f64 {
        self.critical
    }
}

impl Default for BandThresholds {
    fn default() -> Self {
        Self {
            moderate: 0.25,
            high: 0.5,
            critical: 0.75,
        }
    }
}

impl TryFrom<[f64; 3]> for BandThresholds {
    type Error = ConfigError;

    fn try_from(t: [f64; 3]) -> Result<Self, Self::Error> {
        Self::new(t[0], t[1], t[2])
    }
}

impl From<BandThresholds> for [f64; 3] {
    fn from(t: BandThresholds) -> Self {
        [t.moderate, t.high, t.critical]
    }
}

/// Fixed actor weights that replace the data-driven ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightOverrides {
    pub developer: f64,
    pub publisher: f64,
    pub user: f64,
}

impl WeightOverrides {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let w = [self.developer, self.publisher, self.user];
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ConfigError::NegativeWeight(w));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(ConfigError::WeightSum(sum));
        }
        Ok(())
    }
}

/// How absent data is treated.
///
/// With `segment_max_risk` set, a segment that cannot be evaluated scores the
/// maximum risk of 1; otherwise the assessment fails. With `parameter_zero`
/// set, an absent parameter inside an evaluable segment is read as zero;
/// otherwise its whole segment becomes unevaluable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MissingDataPolicy {
    pub segment_max_risk: bool,
    pub parameter_zero: bool,
}

impl Default for MissingDataPolicy {
    fn default() -> Self {
        Self {
            segment_max_risk: true,
            parameter_zero: true,
        }
    }
}

/// Every tunable of the model. Absent fields in a config file take the
/// defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssessmentConfig {
    /// Multiplier on the dependency count.
    pub dependency_sensitivity: f64,
    pub context_table: ContextTable,
    pub band_thresholds: BandThresholds,
    /// The penalty is only added above this final score.
    pub penalty_threshold: f64,
    pub sigmoid_shift: f64,
    pub sigmoid_scale: f64,
    pub weight_overrides: Option<WeightOverrides>,
    pub missing_data_policy: MissingDataPolicy,
}

impl Default for AssessmentConfig {
    fn default() -> Self {
        Self {
            dependency_sensitivity: 1.0,
            context_table: ContextTable::default(),
            band_thresholds: BandThresholds::default(),
            penalty_threshold: 0.5,
            sigmoid_shift: 4.0,
            sigmoid_scale: 0.04,
            weight_overrides: None,
            missing_data_policy: MissingDataPolicy::default(),
        }
    }
}

impl AssessmentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dependency_sensitivity.is_finite() && self.dependency_sensitivity >= 0.0) {
            return Err(ConfigError::Sensitivity(self.dependency_sensitivity));
        }
        self.context_table.validate()?;
        // Thresholds are checked on construction; re-check in case of direct
        // struct literal use inside the crate.
        let t = self.band_thresholds;
        BandThresholds::new(t.moderate, t.high, t.critical)?;
        if !(0.0..=1.0).contains(&self.penalty_threshold) {
            return Err(ConfigError::PenaltyThreshold(self.penalty_threshold));
        }
        if !self.sigmoid_shift.is_finite() || !self.sigmoid_scale.is_finite() {
            return Err(ConfigError::Sigmoid {
                shift: self.sigmoid_shift,
                scale: self.sigmoid_scale,
            });
        }
        if let Some(w) = &self.weight_overrides {
            w.validate()?;
        }
        Ok(())
    }

    /// Parses a JSON config and validates it.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        AssessmentConfig::default().validate().unwrap();
    }

    #[test]
    fn empty_json_takes_defaults() {
        assert_eq!(
            AssessmentConfig::from_json("{}").unwrap(),
            AssessmentConfig::default()
        );
    }

    #[test]
    fn partial_json_overrides_named_fields_only() {
        let c = AssessmentConfig::from_json(
            r#"{"dependency_sensitivity": 2.5, "band_thresholds": [0.2, 0.4, 0.8]}"#,
        )
        .unwrap();
        assert_eq!(c.dependency_sensitivity, 2.5);
        assert_eq!(c.band_thresholds.high(), 0.4);
        assert_eq!(c.penalty_threshold, 0.5);
    }

    #[test]
    fn rejects_unsorted_thresholds() {
        let err = AssessmentConfig::from_json(r#"{"band_thresholds": [0.5, 0.25, 0.75]}"#);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_context_table_not_summing_to_one() {
        let err =
            AssessmentConfig::from_json(r#"{"context_table": {"security": 0.2, "other": 0.5}}"#)
                .unwrap_err();
        assert!(matches!(err, ConfigError::ContextTableSum(_)));
    }

    #[test]
    fn rejects_overrides_not_summing_to_one() {
        let err = AssessmentConfig::from_json(
            r#"{"weight_overrides": {"developer": 0.5, "publisher": 0.5, "user": 0.5}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::WeightSum(_)));
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(AssessmentConfig::from_json(r#"{"sensitivity": 1}"#).is_err());
    }

    #[test]
    fn most_stringent_context_is_security() {
        let table = ContextTable::default();
        assert_eq!(table.most_stringent(), Some(("security", 0.2)));
        assert_eq!(table.label_of(0.3), Some("automation"));
        assert_eq!(table.label_of(0.4), None);
    }
}
