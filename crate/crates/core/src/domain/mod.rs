//! Validated domain types shared by every other module.

mod breakdown;
mod config;
mod record;
mod validate;

pub use breakdown::{Band, RiskBreakdown, Segment};
pub use config::{
    AssessmentConfig, BandThresholds, ContextTable, MissingDataPolicy, WeightOverrides,
    CONTEXT_MATCH_TOLERANCE, SUM_TOLERANCE,
};
pub use record::{DeveloperHistory, PublisherHistory, SoftwareRecord};
pub use validate::{validate_record, Field, Severity, Validation, Violation, ViolationKind};
