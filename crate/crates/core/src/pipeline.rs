//! Batch assessment of a parsed corpus.

use chrono::{DateTime, Utc};
use rayon::prelude::*;

use crate::dataset::{to_record, ActorHistories, CorpusRow, RowError, RowProblem};
use crate::domain::{AssessmentConfig, RiskBreakdown};
use crate::error::{AssessError, ConfigError};
use crate::scoring::assess;

/// Assesses every row in parallel. The output has one entry per input row,
/// in input order. Rows that failed parsing are passed through unchanged.
pub fn assess_rows(
    rows: &[Result<CorpusRow, RowError>],
    histories: &ActorHistories,
    config: &AssessmentConfig,
    now: DateTime<Utc>,
) -> Result<Vec<Result<RiskBreakdown, RowError>>, ConfigError> {
    config.validate()?;
    Ok(rows
        .par_iter()
        .map(|row| match row {
            Ok(row) => assess_row(row, histories, config, now),
            Err(e) => Err(e.clone()),
        })
        .collect())
}

fn assess_row(
    row: &CorpusRow,
    histories: &ActorHistories,
    config: &AssessmentConfig,
    now: DateTime<Utc>,
) -> Result<RiskBreakdown, RowError> {
    let record = to_record(row).map_err(|v| RowError::invalid(row, v))?;
    let inputs = histories.inputs_for(&record);
    assess(&inputs, config, now).map_err(|e| match e {
        AssessError::Invalid { violations, .. } => RowError::invalid(row, violations),
        other => RowError {
            line: row.line,
            sample: Some(record.software_id.clone()),
            problem: RowProblem::Structure {
                message: other.to_string(),
            },
        },
    })
}
