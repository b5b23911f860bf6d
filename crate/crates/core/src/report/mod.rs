//! Report emission and parameter sweeps.

mod emit;
mod format;
mod grid;

pub use emit::{
    emit_breakdowns, emit_row_errors, parse_breakdowns_json, parse_report_csv, timestamp, Format,
    ReportRow, ERROR_HEADER, REPORT_HEADER, SCHEMA_VERSION,
};
pub use format::{format_real, SIGNIFICANT_DIGITS};
pub use grid::{sweep_grid, Axis, GridResult, GridSpec, SweepParameter};
