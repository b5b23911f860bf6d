//! Trust-based risk scoring for software supply chain records.
//!
//! Each record is scored along three actor segments (developer, publisher,
//! user). Data-driven weights combine them, a logistic maps the result into
//! `(0, 1)`, and a context-sensitive penalty is added for software that is
//! already distrusted. The penalized score is then banded into Low,
//! Moderate, High or Critical.
//!
//! ```
//! use chrono::Utc;
//! use trustrisk_core::{assess, AssessmentConfig, SegmentInputs, SoftwareRecord};
//!
//! let mut record = SoftwareRecord::new("left-pad");
//! record.downloads = Some(1000);
//! record.rating_count = Some(400);
//! record.context = Some(0.5);
//! let breakdown = assess(&SegmentInputs::new(record), &AssessmentConfig::default(), Utc::now())
//!     .unwrap();
//! assert!(breakdown.final_risk_penalized <= 1.0);
//! ```

pub mod collector;
pub mod dataset;
pub mod domain;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod scoring;
pub mod selftest;

pub use domain::{
    validate_record, AssessmentConfig, Band, BandThresholds, ContextTable, DeveloperHistory, Field,
    MissingDataPolicy, PublisherHistory, RiskBreakdown, Segment, SoftwareRecord, Validation,
    Violation, WeightOverrides,
};
pub use error::{AssessError, ConfigError, CorpusError, GridError, SnapshotError};
pub use scoring::{assess, assess_adjusted, normalize_scores, Adjustments, SegmentInputs};
