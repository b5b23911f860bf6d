//! One function per scoring formula. All functions are pure.
//!
//! Functions that can hit an undefined ratio return `None`; the caller
//! decides what the missing-data policy does with it.

use serde::{Deserialize, Serialize};

use crate::domain::{Band, BandThresholds, DeveloperHistory, PublisherHistory};

/// Dependency risk: the dependency count scaled by a sensitivity factor
/// (1 leaves the count unchanged).
pub fn code_dependency_risk(dependency_count: u64, sensitivity: f64) -> f64 {
    sensitivity * dependency_count as f64
}

/// Average number of vulnerabilities per software across all developers.
/// `None` when the developers have no software on record.
pub fn developer_vuln_weight(histories: &[DeveloperHistory]) -> Option<f64> {
    let vulns: u64 = histories.iter().map(|h| h.total_vulnerabilities).sum();
    let software: u64 = histories.iter().map(|h| h.software_count).sum();
    (software > 0).then(|| vulns as f64 / software as f64)
}

pub fn code_spec_risk(vuln_weight: f64, code_length: u64) -> f64 {
    vuln_weight * code_length as f64
}

/// One minus the share of experience spent in the assessed language;
/// exactly 1 when the developers have no experience at all.
pub fn language_experience_risk(histories: &[DeveloperHistory]) -> f64 {
    let in_language: u64 = histories.iter().map(|h| h.years_in_language).sum();
    let total: u64 = histories.iter().map(|h| h.years_total).sum();
    if total == 0 {
        1.0
    } else {
        1.0 - in_language as f64 / total as f64
    }
}

/// Share of the developers' software written in the assessed language.
pub fn language_expertise(histories: &[DeveloperHistory]) -> Option<f64> {
    let same: u64 = histories
        .iter()
        .map(|h| h.software_count_same_language)
        .sum();
    let software: u64 = histories.iter().map(|h| h.software_count).sum();
    (software > 0).then(|| same as f64 / software as f64)
}

pub fn dependency_weight(code_coverage: f64) -> f64 {
    1.0 - code_coverage
}

pub fn code_spec_weight(expertise: f64) -> f64 {
    (-expertise).exp()
}

/// `|1 - (w_cd + w_cs)|`. Not renormalized: when both inputs are large the
/// three developer weights sum to more than 1.
pub fn language_weight(dependency_weight: f64, code_spec_weight: f64) -> f64 {
    (1.0 - (dependency_weight + code_spec_weight)).abs()
}

/// Weighted sum of (dependency, code spec, language) risks.
pub fn developer_risk(risks: [f64; 3], weights: [f64; 3]) -> f64 {
    weights[0] * risks[0] + weights[1] * risks[1] + weights[2] * risks[2]
}

/// Years of publishing per published software, divided by the update
/// frequency. A publisher with nothing published, or software with no
/// update frequency, scores the maximum of 1.
pub fn publisher_risk(histories: &[PublisherHistory], update_frequency: Option<f64>) -> f64 {
    let years: u64 = histories.iter().map(|h| h.years_publishing).sum();
    let published: u64 = histories.iter().map(|h| h.published_count).sum();
    match update_frequency {
        Some(f) if f > 0.0 && published > 0 => years as f64 / published as f64 / f,
        _ => 1.0,
    }
}

/// One minus the share of downloads that left a rating. `None` when there
/// are no downloads.
pub fn user_risk(rating_count: u64, downloads: u64) -> Option<f64> {
    (downloads > 0).then(|| 1.0 - rating_count as f64 / downloads as f64)
}

/// `unresolved / total`, 0 for software without vulnerabilities.
pub fn unresolved_proportion(unresolved: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        unresolved as f64 / total as f64
    }
}

pub fn penalty(context_weight: f64, unresolved_proportion: f64) -> f64 {
    if unresolved_proportion == 0.0 {
        return 0.0;
    }
    1.0 - context_weight.powf(unresolved_proportion)
}

/// Weights of the developer, publisher and user segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActorWeights {
    pub developer: f64,
    pub publisher: f64,
    pub user: f64,
}

impl ActorWeights {
    pub fn sum(&self) -> f64 {
        self.developer + self.publisher + self.user
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.developer, self.publisher, self.user]
    }

    /// Weighted sum of (developer, publisher, user) risks.
    pub fn weighted_sum(&self, risks: [f64; 3]) -> f64 {
        self.developer * risks[0] + self.publisher * risks[1] + self.user * risks[2]
    }
}

/// Data-driven actor weights.
///
/// Developer weight is the inverse fork count (1 without forks) and the
/// publisher weight is the Laplace-smoothed probability of an unresolved
/// vulnerability. The user weight takes the remainder. When the first two
/// already exceed 1 the user weight is clamped to 0 and the other two are
/// rescaled so the triple stays on the simplex.
pub fn final_weights(forks: u64, unresolved: u64, resolved: u64) -> ActorWeights {
    let developer = if forks == 0 { 1.0 } else { 1.0 / forks as f64 };
    let publisher = (unresolved as f64 + 1.0) / (resolved as f64 + unresolved as f64 + 2.0);
    let user = 1.0 - (developer + publisher);
    if user >= 0.0 {
        return ActorWeights {
            developer,
            publisher,
            user,
        };
    }
    let total = developer + publisher;
    ActorWeights {
        developer: developer / total,
        publisher: publisher / total,
        user: 0.0,
    }
}

/// Shifted and scaled logistic of the actor-weighted risk sum.
pub fn final_risk(risks: [f64; 3], weights: ActorWeights, shift: f64, scale: f64) -> f64 {
    sigmoid(weights.weighted_sum(risks), shift, scale)
}

/// `1 / (1 + e^(shift - scale * x))`.
pub fn sigmoid(x: f64, shift: f64, scale: f64) -> f64 {
    1.0 / (1.0 + (shift - scale * x).exp())
}

/// Adds the penalty to scores above `threshold`, saturating at 1.
pub fn apply_penalty(final_risk: f64, penalty: f64, threshold: f64) -> f64 {
    if final_risk > threshold && final_risk + penalty < 1.0 {
        final_risk + penalty
    } else if final_risk >= 1.0 - penalty {
        1.0
    } else {
        final_risk
    }
}

/// Lower bounds are inclusive; Critical is closed at the top.
pub fn band(score: f64, thresholds: &BandThresholds) -> Band {
    if score < thresholds.moderate() {
        Band::Low
    } else if score < thresholds.high() {
        Band::Moderate
    } else if score < thresholds.critical() {
        Band::High
    } else {
        Band::Critical
    }
}

/// Min-max normalization over the given set. A constant set maps to zeros.
pub fn normalize_scores(scores: &[f64]) -> Vec<f64> {
    let (min, max) = scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
    let span = max - min;
    scores
        .iter()
        .map(|&s| if span > 0.0 { (s - min) / span } else { 0.0 })
        .collect()
}
