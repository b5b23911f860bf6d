//! Scoring formulas and the end-to-end assessment.

mod assess;
pub mod formulas;

pub use assess::{assess, assess_adjusted, Adjustments, SegmentInputs};
pub use formulas::{
    apply_penalty, band, code_dependency_risk, code_spec_risk, code_spec_weight, dependency_weight,
    developer_risk, developer_vuln_weight, final_risk, final_weights, language_experience_risk,
    language_expertise, language_weight, normalize_scores, penalty, publisher_risk,
    unresolved_proportion, user_risk, ActorWeights,
};
