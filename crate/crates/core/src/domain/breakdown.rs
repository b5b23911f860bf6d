//! The full result of one assessment.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Risk band obtained by thresholding the penalized final score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Low,
    Moderate,
    High,
    Critical,
}

impl Band {
    pub const ALL: [Band; 4] = [Band::Low, Band::Moderate, Band::High, Band::Critical];

    /// Human-readable label, e.g. `Moderate Risk`.
    pub fn label(self) -> &'static str {
        match self {
            Band::Low => "Low Risk",
            Band::Moderate => "Moderate Risk",
            Band::High => "High Risk",
            Band::Critical => "Critical Risk",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Band {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let head = s.strip_suffix(" Risk").unwrap_or(s);
        match head.to_ascii_lowercase().as_str() {
            "low" => Ok(Band::Low),
            "moderate" => Ok(Band::Moderate),
            "high" => Ok(Band::High),
            "critical" => Ok(Band::Critical),
            _ => Err(format!("unknown band `{s}`")),
        }
    }
}

/// Actor-scoped risk segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    Developer,
    Publisher,
    User,
}

impl Segment {
    pub fn name(self) -> &'static str {
        match self {
            Segment::Developer => "developer",
            Segment::Publisher => "publisher",
            Segment::User => "user",
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Segment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "developer" => Ok(Segment::Developer),
            "publisher" => Ok(Segment::Publisher),
            "user" => Ok(Segment::User),
            other => Err(format!("unknown segment `{other}`")),
        }
    }
}

/// Every intermediate and final quantity of one assessment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskBreakdown {
    pub software_id: String,
    pub assessed_at: DateTime<Utc>,

    // Developer segment.
    pub dependency_risk: f64,
    /// Average vulnerabilities per software across the developers.
    pub vulnerability_weight: f64,
    pub code_spec_risk: f64,
    pub language_risk: f64,
    pub language_expertise: f64,
    pub dependency_weight: f64,
    pub code_spec_weight: f64,
    pub language_weight: f64,
    pub developer_risk: f64,

    pub publisher_risk: f64,
    pub user_risk: f64,

    // Penalty.
    pub context_weight: f64,
    pub unresolved_proportion: f64,
    pub penalty: f64,

    // Actor weights and scores.
    pub developer_weight: f64,
    pub publisher_weight: f64,
    pub user_weight: f64,
    pub final_risk: f64,
    pub final_risk_penalized: f64,
    pub band: Band,

    /// Segments forced to maximum risk because of missing data.
    pub segments_defaulted: BTreeSet<Segment>,
}

impl RiskBreakdown {
    /// Names accepted by [`RiskBreakdown::quantity`].
    pub const QUANTITIES: [&'static str; 21] = [
        "dependency_risk",
        "vulnerability_weight",
        "code_spec_risk",
        "language_risk",
        "language_expertise",
        "dependency_weight",
        "code_spec_weight",
        "language_weight",
        "developer_risk",
        "publisher_risk",
        "user_risk",
        "context_weight",
        "unresolved_proportion",
        "penalty",
        "developer_weight",
        "publisher_weight",
        "user_weight",
        "final_risk",
        "final_risk_penalized",
        "weighted_sum",
        "band",
    ];

    /// Looks up a numeric quantity by field name. `band` maps to its ordinal
    /// (Low = 0 .. Critical = 3).
    pub fn quantity(&self, name: &str) -> Option<f64> {
        Some(match name {
            "dependency_risk" => self.dependency_risk,
            "vulnerability_weight" => self.vulnerability_weight,
            "code_spec_risk" => self.code_spec_risk,
            "language_risk" => self.language_risk,
            "language_expertise" => self.language_expertise,
            "dependency_weight" => self.dependency_weight,
            "code_spec_weight" => self.code_spec_weight,
            "language_weight" => self.language_weight,
            "developer_risk" => self.developer_risk,
            "publisher_risk" => self.publisher_risk,
            "user_risk" => self.user_risk,
            "context_weight" => self.context_weight,
            "unresolved_proportion" => self.unresolved_proportion,
            "penalty" => self.penalty,
            "developer_weight" => self.developer_weight,
            "publisher_weight" => self.publisher_weight,
            "user_weight" => self.user_weight,
            "final_risk" => self.final_risk,
            "final_risk_penalized" => self.final_risk_penalized,
            "weighted_sum" => self.weighted_sum(),
            "band" => self.band as u8 as f64,
            _ => return None,
        })
    }

    /// Actor-weighted sum fed into the sigmoid.
    pub fn weighted_sum(&self) -> f64 {
        self.developer_weight * self.developer_risk
            + self.publisher_weight * self.publisher_risk
            + self.user_weight * self.user_risk
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_labels_round_trip() {
        for band in Band::ALL {
            assert_eq!(band.label().parse::<Band>().unwrap(), band);
        }
        assert_eq!("moderate".parse::<Band>().unwrap(), Band::Moderate);
        assert!("severe".parse::<Band>().is_err());
    }

    #[test]
    fn bands_are_ordered_by_severity() {
        assert!(Band::Low < Band::Moderate && Band::High < Band::Critical);
    }
}
