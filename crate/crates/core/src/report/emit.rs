//! Breakdown reports in tabular (CSV) and structured (JSON) form.

use std::collections::BTreeSet;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::format::format_real;
use crate::dataset::RowError;
use crate::domain::{Band, RiskBreakdown, Segment};

pub const SCHEMA_VERSION: &str = "1";

/// Columns of the tabular report.
pub const REPORT_HEADER: [&str; 9] = [
    "sample",
    "assessed_at",
    "segments_defaulted",
    "r_dev",
    "r_pb",
    "r_ur",
    "r_f",
    "r_fp",
    "band",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" | "tabular" => Ok(Format::Csv),
            "json" | "structured" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Document<T> {
    schema_version: String,
    breakdowns: T,
}

/// Serializes breakdowns in the requested format.
pub fn emit_breakdowns(breakdowns: &[RiskBreakdown], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => emit_csv(breakdowns),
        Format::Json => {
            let doc = Document {
                schema_version: SCHEMA_VERSION.to_owned(),
                breakdowns,
            };
            let mut out = serde_json::to_vec_pretty(&doc).expect("breakdowns serialize");
            out.push(b'\n');
            out
        }
    }
}

fn emit_csv(breakdowns: &[RiskBreakdown]) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(REPORT_HEADER).expect("in-memory write");
    for b in breakdowns {
        writer
            .write_record([
                b.software_id.clone(),
                timestamp(&b.assessed_at),
                defaulted_cell(&b.segments_defaulted),
                format_real(b.developer_risk),
                format_real(b.publisher_risk),
                format_real(b.user_risk),
                format_real(b.final_risk),
                format_real(b.final_risk_penalized),
                b.band.label().to_owned(),
            ])
            .expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}

/// Columns of the error sidecar.
pub const ERROR_HEADER: [&str; 4] = ["line", "sample", "field", "message"];

/// One sidecar line per problem; a row with three violations gives three
/// lines.
pub fn emit_row_errors(errors: &[RowError]) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(ERROR_HEADER).expect("in-memory write");
    for e in errors {
        for (field, message) in e.messages() {
            writer
                .write_record([
                    e.line.to_string(),
                    e.sample.clone().unwrap_or_default(),
                    field.map(|f| f.column().to_owned()).unwrap_or_default(),
                    message,
                ])
                .expect("in-memory write");
        }
    }
    writer.into_inner().expect("in-memory flush")
}

pub fn timestamp(at: &DateTime<Utc>) -> String {
    at.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// `developer;user`, or an empty string when nothing was defaulted.
fn defaulted_cell(segments: &BTreeSet<Segment>) -> String {
    segments
        .iter()
        .map(|s| s.name())
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses a structured report back into breakdowns.
pub fn parse_breakdowns_json(text: &str) -> Result<Vec<RiskBreakdown>, String> {
    let doc: Document<Vec<RiskBreakdown>> =
        serde_json::from_str(text).map_err(|e| e.to_string())?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported schema_version `{}` (expected `{SCHEMA_VERSION}`)",
            doc.schema_version
        ));
    }
    Ok(doc.breakdowns)
}

/// One line of a tabular report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub sample: String,
    pub assessed_at: DateTime<Utc>,
    pub segments_defaulted: BTreeSet<Segment>,
    pub developer_risk: f64,
    pub publisher_risk: f64,
    pub user_risk: f64,
    pub final_risk: f64,
    pub final_risk_penalized: f64,
    pub band: Band,
}

/// Parses a tabular report.
pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>, String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_owned)
        .collect();
    if header != REPORT_HEADER {
        return Err(format!("unexpected report header {header:?}"));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let real = |i: usize| -> Result<f64, String> {
            rec[i]
                .parse()
                .map_err(|_| format!("column {}: `{}` is not a number", REPORT_HEADER[i], &rec[i]))
        };
        rows.push(ReportRow {
            sample: rec[0].to_owned(),
            assessed_at: DateTime::parse_from_rfc3339(&rec[1])
                .map_err(|e| format!("assessed_at `{}`: {e}", &rec[1]))?
                .with_timezone(&Utc),
            segments_defaulted: rec[2]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<Result<_, _>>()?,
            developer_risk: real(3)?,
            publisher_risk: real(4)?,
            user_risk: real(5)?,
            final_risk: real(6)?,
            final_risk_penalized: real(7)?,
            band: rec[8].parse()?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn breakdown(fp: f64, band: Band) -> RiskBreakdown {
        RiskBreakdown {
            software_id: "1".into(),
            assessed_at: Utc.with_ymd_and_hms(2024, 3, 1, 12, 0, 0).unwrap(),
            dependency_risk: 26.0,
            vulnerability_weight: 10.0,
            code_spec_risk: 2220.0,
            language_risk: 0.0,
            language_expertise: 0.5,
            dependency_weight: 0.03,
            code_spec_weight: 0.6,
            language_weight: 0.37,
            developer_risk: 48476.27,
            publisher_risk: 0.37,
            user_risk: 0.66,
            context_weight: 0.2,
            unresolved_proportion: 0.0,
            penalty: 0.0,
            developer_weight: 0.1,
            publisher_weight: 0.2,
            user_weight: 0.7,
            final_risk: fp,
            final_risk_penalized: fp,
            band,
            segments_defaulted: BTreeSet::new(),
        }
    }

    #[test]
    fn csv_row_ends_with_score_and_band() {
        let out = String::from_utf8(emit_breakdowns(
            &[breakdown(0.37, Band::Moderate)],
            Format::Csv,
        ))
        .unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), REPORT_HEADER.join(","));
        let row = lines.next().unwrap();
        assert!(row.ends_with(",0.37,Moderate Risk"), "{row}");
        assert_eq!(
            row,
            "1,2024-03-01T12:00:00Z,,48476.27,0.37,0.66,0.37,0.37,Moderate Risk"
        );
    }

    #[test]
    fn defaulted_segments_are_joined() {
        let mut b = breakdown(0.9, Band::Critical);
        b.segments_defaulted = [Segment::User, Segment::Developer].into();
        let out = String::from_utf8(emit_breakdowns(&[b], Format::Csv)).unwrap();
        assert!(out.lines().nth(1).unwrap().contains(",developer;user,"));
    }

    #[test]
    fn json_round_trip() {
        let mut b = breakdown(0.391034647161056, Band::Moderate);
        b.developer_weight = 1.0 / 2003.0;
        b.segments_defaulted.insert(Segment::Publisher);
        let out = emit_breakdowns(&[b.clone()], Format::Json);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("\"schema_version\": \"1\""));
        assert_eq!(parse_breakdowns_json(&text).unwrap(), vec![b]);
    }

    #[test]
    fn csv_round_trip() {
        let mut b = breakdown(0.65, Band::High);
        b.segments_defaulted.insert(Segment::User);
        let text = String::from_utf8(emit_breakdowns(&[b.clone()], Format::Csv)).unwrap();
        let rows = parse_report_csv(&text).unwrap();
        assert_eq!(rows[0].final_risk_penalized, 0.65);
        assert_eq!(rows[0].band, Band::High);
        assert_eq!(rows[0].assessed_at, b.assessed_at);
        assert!(rows[0].segments_defaulted.contains(&Segment::User));
    }

    #[test]
    fn sidecar_lists_each_violation() {
        use crate::dataset::parse_corpus;
        let text = "Sample,Code Length,Developer,Publisher,Year,Language,Update Frequency,Forks,\
Downloads,Unresolved Vulnerabilities,Known Vulnerabilities,Dependencies,Rating,Code Coverage,Context
7,304,W,Z,2018,Java,0.5,-3,3.5,1,2,3,1,0.3,0.2
";
        let rows = parse_corpus(text.as_bytes()).unwrap();
        let err = rows[0].clone().unwrap_err();
        let out = String::from_utf8(emit_row_errors(&[err])).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "line,sample,field,message");
        assert_eq!(lines.len(), 3, "{out}");
        assert!(lines[1].starts_with("2,7,Forks,"), "{out}");
        assert!(lines[2].starts_with("2,7,Downloads,"), "{out}");
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = r#"{"schema_version": "2", "breakdowns": []}"#;
        assert!(parse_breakdowns_json(text).is_err());
    }
}
