//! Full assessment pipeline: record and actor histories in, breakdown out.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::formulas::{self, ActorWeights};
use crate::domain::{
    validate_record, AssessmentConfig, DeveloperHistory, MissingDataPolicy, PublisherHistory,
    RiskBreakdown, Segment, SoftwareRecord,
};
use crate::error::AssessError;

/// A record together with the histories of its developers and publishers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SegmentInputs {
    pub record: SoftwareRecord,
    #[serde(default)]
    pub developer_histories: Vec<DeveloperHistory>,
    #[serde(default)]
    pub publisher_histories: Vec<PublisherHistory>,
}

impl SegmentInputs {
    pub fn new(record: SoftwareRecord) -> Self {
        Self {
            record,
            ..Self::default()
        }
    }
}

/// What-if substitutions applied on top of the computed quantities. Used by
/// parameter sweeps; a default value changes nothing.
///
/// Pinned actor weights are kept as given and the unpinned ones share the
/// remaining mass in proportion to their computed values. Pinned context
/// weights bypass the context table.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Adjustments {
    pub developer_risk: Option<f64>,
    pub publisher_risk: Option<f64>,
    pub user_risk: Option<f64>,
    pub developer_weight: Option<f64>,
    pub publisher_weight: Option<f64>,
    pub user_weight: Option<f64>,
    pub context_weight: Option<f64>,
    pub unresolved_proportion: Option<f64>,
}

/// Runs the whole scoring chain on one record.
pub fn assess(
    inputs: &SegmentInputs,
    config: &AssessmentConfig,
    now: DateTime<Utc>,
) -> Result<RiskBreakdown, AssessError> {
    assess_adjusted(inputs, config, now, &Adjustments::default())
}

/// [`assess`] with what-if substitutions.
pub fn assess_adjusted(
    inputs: &SegmentInputs,
    config: &AssessmentConfig,
    now: DateTime<Utc>,
    adjust: &Adjustments,
) -> Result<RiskBreakdown, AssessError> {
    config.validate()?;
    let record = &inputs.record;
    let validation = validate_record(record, config);
    if !validation.is_ok() {
        return Err(AssessError::Invalid {
            software_id: record.software_id.clone(),
            violations: validation.hard().cloned().collect(),
        });
    }

    let policy = config.missing_data_policy;
    let mut defaulted = BTreeSet::new();

    let dev = match developer_segment(record, &inputs.developer_histories, config) {
        Some(dev) => dev,
        None => {
            default_segment(policy, Segment::Developer, &mut defaulted)?;
            DeveloperSegment::max_risk()
        }
    };

    let publisher_risk = if inputs.publisher_histories.is_empty()
        || (record.update_frequency.is_none() && !policy.parameter_zero)
    {
        default_segment(policy, Segment::Publisher, &mut defaulted)?;
        1.0
    } else {
        formulas::publisher_risk(&inputs.publisher_histories, record.update_frequency)
    };

    let user_risk = match (record.downloads, record.rating_count) {
        (Some(downloads), rating) if rating.is_some() || policy.parameter_zero => {
            formulas::user_risk(rating.unwrap_or(0), downloads)
        }
        _ => None,
    };
    let user_risk = match user_risk {
        Some(r) => r,
        None => {
            default_segment(policy, Segment::User, &mut defaulted)?;
            1.0
        }
    };

    // Absent vulnerability counts read as zero; an absent total with a known
    // unresolved count means nothing is known to be resolved.
    let unresolved = record.vulnerabilities_unresolved.unwrap_or(0);
    let total = record.vulnerabilities_total.unwrap_or(unresolved);
    let resolved = total - unresolved;

    let context_weight = match adjust.context_weight.or(record.context) {
        Some(c) => c,
        None => config
            .context_table
            .most_stringent()
            .map(|(_, w)| w)
            .expect("validated context table is nonempty"),
    };
    let unresolved_proportion = adjust
        .unresolved_proportion
        .unwrap_or_else(|| formulas::unresolved_proportion(unresolved, total));
    let penalty = formulas::penalty(context_weight, unresolved_proportion);

    let mut weights = match config.weight_overrides {
        Some(o) => ActorWeights {
            developer: o.developer,
            publisher: o.publisher,
            user: o.user,
        },
        None => formulas::final_weights(record.forks.unwrap_or(0), unresolved, resolved),
    };
    pin_weights(&mut weights, adjust);

    let mut risks = [dev.risk, publisher_risk, user_risk];
    for (slot, (pin, segment)) in risks.iter_mut().zip([
        (adjust.developer_risk, Segment::Developer),
        (adjust.publisher_risk, Segment::Publisher),
        (adjust.user_risk, Segment::User),
    ]) {
        if let Some(value) = pin {
            *slot = value;
            defaulted.remove(&segment);
        }
    }

    let final_risk =
        formulas::final_risk(risks, weights, config.sigmoid_shift, config.sigmoid_scale);
    let final_risk_penalized =
        formulas::apply_penalty(final_risk, penalty, config.penalty_threshold);
    let band = formulas::band(final_risk_penalized, &config.band_thresholds);

    Ok(RiskBreakdown {
        software_id: record.software_id.clone(),
        assessed_at: now,
        dependency_risk: dev.dependency_risk,
        vulnerability_weight: dev.vulnerability_weight,
        code_spec_risk: dev.code_spec_risk,
        language_risk: dev.language_risk,
        language_expertise: dev.language_expertise,
        dependency_weight: dev.dependency_weight,
        code_spec_weight: dev.code_spec_weight,
        language_weight: dev.language_weight,
        developer_risk: risks[0],
        publisher_risk: risks[1],
        user_risk: risks[2],
        context_weight,
        unresolved_proportion,
        penalty,
        developer_weight: weights.developer,
        publisher_weight: weights.publisher,
        user_weight: weights.user,
        final_risk,
        final_risk_penalized,
        band,
        segments_defaulted: defaulted,
    })
}

fn default_segment(
    policy: MissingDataPolicy,
    segment: Segment,
    defaulted: &mut BTreeSet<Segment>,
) -> Result<(), AssessError> {
    if !policy.segment_max_risk {
        return Err(AssessError::Unevaluable(segment));
    }
    defaulted.insert(segment);
    Ok(())
}

/// Developer-segment quantities. A defaulted segment reports risk 1 and
/// zero for every sub-quantity.
#[derive(Debug, Clone, Copy, Default)]
struct DeveloperSegment {
    dependency_risk: f64,
    vulnerability_weight: f64,
    code_spec_risk: f64,
    language_risk: f64,
    language_expertise: f64,
    dependency_weight: f64,
    code_spec_weight: f64,
    language_weight: f64,
    risk: f64,
}

impl DeveloperSegment {
    fn max_risk() -> Self {
        Self {
            risk: 1.0,
            ..Self::default()
        }
    }
}

/// `None` when the segment cannot be evaluated.
fn developer_segment(
    record: &SoftwareRecord,
    histories: &[DeveloperHistory],
    config: &AssessmentConfig,
) -> Option<DeveloperSegment> {
    let zero_fill = config.missing_data_policy.parameter_zero;
    let param = |v: Option<u64>| if zero_fill { Some(v.unwrap_or(0)) } else { v };

    let vulnerability_weight = formulas::developer_vuln_weight(histories)?;
    let language_expertise = formulas::language_expertise(histories)?;
    let dependencies = param(record.dependency_count)?;
    let code_length = param(record.code_length)?;
    let coverage = match record.code_coverage {
        Some(c) => c,
        None if zero_fill => 0.0,
        None => return None,
    };

    let dependency_risk =
        formulas::code_dependency_risk(dependencies, config.dependency_sensitivity);
    let code_spec_risk = formulas::code_spec_risk(vulnerability_weight, code_length);
    let language_risk = formulas::language_experience_risk(histories);
    let dependency_weight = formulas::dependency_weight(coverage);
    let code_spec_weight = formulas::code_spec_weight(language_expertise);
    let language_weight = formulas::language_weight(dependency_weight, code_spec_weight);
    let risk = formulas::developer_risk(
        [dependency_risk, code_spec_risk, language_risk],
        [dependency_weight, code_spec_weight, language_weight],
    );

    Some(DeveloperSegment {
        dependency_risk,
        vulnerability_weight,
        code_spec_risk,
        language_risk,
        language_expertise,
        dependency_weight,
        code_spec_weight,
        language_weight,
        risk,
    })
}

fn pin_weights(weights: &mut ActorWeights, adjust: &Adjustments) {
    let pins = [
        adjust.developer_weight,
        adjust.publisher_weight,
        adjust.user_weight,
    ];
    if pins.iter().all(Option::is_none) {
        return;
    }
    let current = weights.as_array();
    let pinned_mass: f64 = pins.iter().flatten().sum();
    let free_mass: f64 = current
        .iter()
        .zip(&pins)
        .filter(|(_, p)| p.is_none())
        .map(|(w, _)| *w)
        .sum();
    let free_count = pins.iter().filter(|p| p.is_none()).count();

    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = match pins[i] {
            // Over-full pins are scaled back onto the simplex.
            Some(p) if pinned_mass > 1.0 => p / pinned_mass,
            Some(p) => p,
            None if pinned_mass >= 1.0 => 0.0,
            None if free_mass > 0.0 => (1.0 - pinned_mass) * current[i] / free_mass,
            None => (1.0 - pinned_mass) / free_count as f64,
        };
    }
    *weights = ActorWeights {
        developer: out[0],
        publisher: out[1],
        user: out[2],
    };
}
