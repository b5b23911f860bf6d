//! Two-parameter sweeps over the assessment, emitted as a matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::format::format_real;
use crate::domain::{AssessmentConfig, RiskBreakdown};
use crate::error::GridError;
use crate::scoring::{assess_adjusted, Adjustments, SegmentInputs};

/// A quantity that a sweep axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepParameter {
    CodeLength,
    Forks,
    Downloads,
    VulnerabilitiesUnresolved,
    VulnerabilitiesTotal,
    DependencyCount,
    RatingCount,
    CodeCoverage,
    UpdateFrequency,
    Context,
    UnresolvedProportion,
    DependencySensitivity,
    PenaltyThreshold,
    DeveloperWeight,
    PublisherWeight,
    UserWeight,
    DeveloperRisk,
    PublisherRisk,
    UserRisk,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 19] = [
        SweepParameter::CodeLength,
        SweepParameter::Forks,
        SweepParameter::Downloads,
        SweepParameter::VulnerabilitiesUnresolved,
        SweepParameter::VulnerabilitiesTotal,
        SweepParameter::DependencyCount,
        SweepParameter::RatingCount,
        SweepParameter::CodeCoverage,
        SweepParameter::UpdateFrequency,
        SweepParameter::Context,
        SweepParameter::UnresolvedProportion,
        SweepParameter::DependencySensitivity,
        SweepParameter::PenaltyThreshold,
        SweepParameter::DeveloperWeight,
        SweepParameter::PublisherWeight,
        SweepParameter::UserWeight,
        SweepParameter::DeveloperRisk,
        SweepParameter::PublisherRisk,
        SweepParameter::UserRisk,
    ];

    pub fn name(self) -> &'static str {
        use SweepParameter as P;
        match self {
            P::CodeLength => "code_length",
            P::Forks => "forks",
            P::Downloads => "downloads",
            P::VulnerabilitiesUnresolved => "vulnerabilities_unresolved",
            P::VulnerabilitiesTotal => "vulnerabilities_total",
            P::DependencyCount => "dependency_count",
            P::RatingCount => "rating_count",
            P::CodeCoverage => "code_coverage",
            P::UpdateFrequency => "update_frequency",
            P::Context => "context",
            P::UnresolvedProportion => "unresolved_proportion",
            P::DependencySensitivity => "dependency_sensitivity",
            P::PenaltyThreshold => "penalty_threshold",
            P::DeveloperWeight => "developer_weight",
            P::PublisherWeight => "publisher_weight",
            P::UserWeight => "user_weight",
            P::DeveloperRisk => "developer_risk",
            P::PublisherRisk => "publisher_risk",
            P::UserRisk => "user_risk",
        }
    }

    fn known() -> String {
        Self::ALL.map(Self::name).join(", ")
    }

    /// Substitutes `value` into the inputs. Count parameters are rounded to
    /// the nearest integer.
    fn apply(
        self,
        value: f64,
        inputs: &mut SegmentInputs,
        config: &mut AssessmentConfig,
        adjust: &mut Adjustments,
    ) -> Result<(), GridError> {
        use SweepParameter as P;
        if !value.is_finite() {
            return Err(self.invalid(format!("value {value} is not finite")));
        }
        let count = || -> Result<Option<u64>, GridError> {
            if value < 0.0 {
                Err(self.invalid(format!("count {value} is negative")))
            } else {
                Ok(Some(value.round() as u64))
            }
        };
        let r = &mut inputs.record;
        match self {
            P::CodeLength => r.code_length = count()?,
            P::Forks => r.forks = count()?,
            P::Downloads => r.downloads = count()?,
            P::VulnerabilitiesUnresolved => r.vulnerabilities_unresolved = count()?,
            P::VulnerabilitiesTotal => r.vulnerabilities_total = count()?,
            P::DependencyCount => r.dependency_count = count()?,
            P::RatingCount => r.rating_count = count()?,
            P::CodeCoverage => r.code_coverage = Some(value),
            P::UpdateFrequency => r.update_frequency = Some(value),
            P::Context => adjust.context_weight = Some(value),
            P::UnresolvedProportion => adjust.unresolved_proportion = Some(value),
            P::DependencySensitivity => config.dependency_sensitivity = value,
            P::PenaltyThreshold => config.penalty_threshold = value,
            P::DeveloperWeight => adjust.developer_weight = Some(value),
            P::PublisherWeight => adjust.publisher_weight = Some(value),
            P::UserWeight => adjust.user_weight = Some(value),
            P::DeveloperRisk => adjust.developer_risk = Some(value),
            P::PublisherRisk => adjust.publisher_risk = Some(value),
            P::UserRisk => adjust.user_risk = Some(value),
        }
        Ok(())
    }

    fn invalid(self, reason: String) -> GridError {
        GridError::InvalidAxis {
            name: self.name().to_owned(),
            reason,
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| GridError::UnknownParameter {
                name: s.to_owned(),
                known: Self::known(),
            })
    }
}

/// One sweep axis: either an inclusive `start..=stop` range walked in
/// `step` increments, or an explicit list of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub parameter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Axis {
    pub fn range(parameter: &str, start: f64, stop: f64, step: f64) -> Self {
        Self {
            parameter: parameter.to_owned(),
            start: Some(start),
            stop: Some(stop),
            step: Some(step),
            values: None,
        }
    }

    pub fn list(parameter: &str, values: Vec<f64>) -> Self {
        Self {
            parameter: parameter.to_owned(),
            start: None,
            stop: None,
            step: None,
            values: Some(values),
        }
    }

    /// The axis values, `start + i * step` for every `i` that stays within
    /// `stop` (with a relative slack of 1e-9 steps).
    pub fn values(&self) -> Result<Vec<f64>, GridError> {
        let invalid = |reason: &str| GridError::InvalidAxis {
            name: self.parameter.clone(),
            reason: reason.to_owned(),
        };
        if let Some(values) = &self.values {
            if self.start.is_some() || self.stop.is_some() || self.step.is_some() {
                return Err(invalid("give either values or start/stop/step, not both"));
            }
            if values.is_empty() {
                return Err(invalid("values list is empty"));
            }
            return Ok(values.clone());
        }
        let (Some(start), Some(stop), Some(step)) = (self.start, self.stop, self.step) else {
            return Err(invalid("start, stop and step are required"));
        };
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid("step must be positive"));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(invalid("range is empty"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| start + i as f64 * step).collect())
    }
}

/// Definition of a two-parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
    /// Parameters pinned for every cell.
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    /// Name of a breakdown quantity, e.g. `final_risk_penalized`.
    pub output: String,
}

/// Sweep result. Axis names are empty when parsed back from CSV.
/// `cells[i][j]` holds the output at `y_values[i]`,
/// `x_values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub output: String,
    pub x_parameter: String,
    pub y_parameter: String,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    pub cells: Vec<Vec<f64>>,
}

/// Evaluates the spec's output quantity on every cell of the grid.
pub fn sweep_grid(
    spec: &GridSpec,
    base: &SegmentInputs,
    config: &AssessmentConfig,
) -> Result<GridResult, GridError> {
    let x_param: SweepParameter = spec.x.parameter.parse()?;
    let y_param: SweepParameter = spec.y.parameter.parse()?;
    if x_param == y_param {
        return Err(GridError::SameParameter(x_param.name().to_owned()));
    }
    if !RiskBreakdown::QUANTITIES.contains(&spec.output.as_str()) {
        return Err(GridError::UnknownQuantity {
            name: spec.output.clone(),
            known: RiskBreakdown::QUANTITIES.join(", "),
        });
    }
    let x_values = spec.x.values()?;
    let y_values = spec.y.values()?;

    let mut inputs = base.clone();
    let mut cfg = config.clone();
    let mut adjust = Adjustments::default();
    for (name, value) in &spec.fixed {
        let param: SweepParameter = name.parse()?;
        if param == x_param || param == y_param {
            return Err(param.invalid("fixed and swept at once".to_owned()));
        }
        param.apply(*value, &mut inputs, &mut cfg, &mut adjust)?;
    }

    // The output is numeric, so the timestamp is irrelevant; a constant
    // keeps cells reproducible.
    let at = DateTime::<Utc>::UNIX_EPOCH;
    let cells = y_values
        .par_iter()
        .map(|&y| {
            x_values
                .iter()
                .map(|&x| {
                    let (mut inputs, mut cfg, mut adjust) = (inputs.clone(), cfg.clone(), adjust);
                    x_param.apply(x, &mut inputs, &mut cfg, &mut adjust)?;
                    y_param.apply(y, &mut inputs, &mut cfg, &mut adjust)?;
                    let b = assess_adjusted(&inputs, &cfg, at, &adjust)?;
                    Ok(b.quantity(&spec.output).expect("quantity name checked"))
                })
                .collect::<Result<Vec<f64>, GridError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(GridResult {
        output: spec.output.clone(),
        x_parameter: x_param.name().to_owned(),
        y_parameter: y_param.name().to_owned(),
        x_values,
        y_values,
        cells,
    })
}

impl GridResult {
    pub fn rows(&self) -> usize {
        self.y_values.len()
    }

    pub fn cols(&self) -> usize {
        self.x_values.len()
    }

    /// CSV with x values across the first row, y values down the first
    /// column and the output name in the corner. Axis names are not part
    /// of the file.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut head = vec![self.output.clone()];
        head.extend(self.x_values.iter().map(|&v| format_real(v)));
        writer.write_record(&head).expect("in-memory write");
        for (y, row) in self.y_values.iter().zip(&self.cells) {
            let mut line = vec![format_real(*y)];
            line.extend(row.iter().map(|&v| format_real(v)));
            writer.write_record(&line).expect("in-memory write");
        }
        writer.into_inner().expect("in-memory flush")
    }

    pub fn from_csv(text: &str) -> Result<Self, GridError> {
        let malformed = |m: String| GridError::Malformed(m);
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(text.as_bytes());
        let mut records = reader.records();
        let head = records
            .next()
            .ok_or_else(|| malformed("empty grid".into()))?
            .map_err(|e| malformed(e.to_string()))?;
        let output = head.get(0).unwrap_or("");
        if output.is_empty() {
            return Err(malformed("corner cell is empty".into()));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| malformed(format!("`{s}` is not a number")))
        };
        let x_values = head
            .iter()
            .skip(1)
            .map(parse)
            .collect::<Result<Vec<_>, _>>()?;
        let mut y_values = Vec::new();
        let mut cells = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| malformed(e.to_string()))?;
            if rec.len() != x_values.len() + 1 {
                return Err(malformed(format!(
                    "row has {} cells, expected {}",
                    rec.len(),
                    x_values.len() + 1
                )));
            }
            y_values.push(parse(&rec[0])?);
            cells.push(
                rec.iter()
                    .skip(1)
                    .map(parse)
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(Self {
            output: output.to_owned(),
            x_parameter: String::new(),
            y_parameter: String::new(),
            x_values,
            y_values,
            cells,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DeveloperHistory, PublisherHistory, SoftwareRecord};

    fn base() -> SegmentInputs {
        SegmentInputs {
            record: SoftwareRecord {
                software_id: "base".into(),
                developer_ids: vec!["W".into()],
                publisher_ids: vec!["Z".into()],
                year: Some(2018),
                language: Some("Java".into()),
                update_frequency: Some(0.08424),
                forks: Some(2003),
                downloads: Some(20455),
                vulnerabilities_unresolved: Some(135),
                vulnerabilities_total: Some(7556),
                dependency_count: Some(28),
                rating_count: Some(7153),
                code_coverage: Some(0.99),
                context: Some(0.2),
                code_length: Some(304),
            },
            developer_histories: vec![DeveloperHistory {
                developer_id: "W".into(),
                total_vulnerabilities: 96912,
                software_count: 129,
                software_count_same_language: 33,
                years_in_language: 2,
                years_total: 2,
            }],
            publisher_histories: vec![PublisherHistory {
                publisher_id: "Z".into(),
                published_count: 123,
                years_publishing: 2,
            }],
        }
    }

    #[test]
    fn axis_step_count_is_exact() {
        assert_eq!(
            Axis::range("forks", 0.0, 1.0, 0.1).values().unwrap().len(),
            11
        );
        assert_eq!(
            Axis::range("forks", 0.0, 0.95, 0.1).values().unwrap().len(),
            10
        );
        assert_eq!(
            Axis::range("forks", 3.0, 3.0, 1.0).values().unwrap(),
            vec![3.0]
        );
        assert!(Axis::range("forks", 0.0, 1.0, 0.0).values().is_err());
        assert!(Axis::range("forks", 1.0, 0.0, 0.1).values().is_err());
    }

    #[test]
    fn single_cell_matches_assess() {
        let spec = GridSpec {
            x: Axis::list("forks", vec![2003.0]),
            y: Axis::list("dependency_count", vec![28.0]),
            fixed: BTreeMap::new(),
            output: "final_risk_penalized".into(),
        };
        let config = AssessmentConfig::default();
        let grid = sweep_grid(&spec, &base(), &config).unwrap();
        let direct = crate::scoring::assess(&base(), &config, Utc::now()).unwrap();
        assert_eq!(grid.cells, vec![vec![direct.final_risk_penalized]]);
    }

    #[test]
    fn developer_weight_sweep_is_monotone() {
        let spec = GridSpec {
            x: Axis::range("developer_weight", 0.0, 1.0, 0.05),
            y: Axis::range("developer_risk", 1.0, 200.0, 10.0),
            fixed: BTreeMap::new(),
            output: "final_risk_penalized".into(),
        };
        let grid = sweep_grid(&spec, &base(), &AssessmentConfig::default()).unwrap();
        for row in &grid.cells {
            assert!(row.windows(2).all(|w| w[1] >= w[0]), "{row:?}");
        }
    }

    #[test]
    fn unknown_parameter_lists_alternatives() {
        let spec = GridSpec {
            x: Axis::list("stars", vec![1.0]),
            y: Axis::list("forks", vec![1.0]),
            fixed: BTreeMap::new(),
            output: "penalty".into(),
        };
        match sweep_grid(&spec, &base(), &AssessmentConfig::default()) {
            Err(GridError::UnknownParameter { name, known }) => {
                assert_eq!(name, "stars");
                assert!(known.contains("developer_weight"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_same_axis_and_unknown_output() {
        let mut spec = GridSpec {
            x: Axis::list("forks", vec![1.0]),
            y: Axis::list("forks", vec![1.0]),
            fixed: BTreeMap::new(),
            output: "penalty".into(),
        };
        assert!(matches!(
            sweep_grid(&spec, &base(), &AssessmentConfig::default()),
            Err(GridError::SameParameter(_))
        ));
        spec.y = Axis::list("context", vec![0.2]);
        spec.output = "risk".into();
        assert!(matches!(
            sweep_grid(&spec, &base(), &AssessmentConfig::default()),
            Err(GridError::UnknownQuantity { .. })
        ));
    }

    #[test]
    fn csv_round_trip_at_twelve_digits() {
        let spec = GridSpec {
            x: Axis::range("unresolved_proportion", 0.0, 1.0, 0.1),
            y: Axis::list("context", vec![0.2, 0.3, 0.5]),
            fixed: BTreeMap::new(),
            output: "penalty".into(),
        };
        let grid = sweep_grid(&spec, &base(), &AssessmentConfig::default()).unwrap();
        let text = String::from_utf8(grid.to_csv()).unwrap();
        assert!(text.starts_with("penalty,0,0.1,"));
        let back = GridResult::from_csv(&text).unwrap();
        assert_eq!((back.rows(), back.cols()), (3, 11));
        assert_eq!(back.output, "penalty");
        for (a, b) in grid.cells.iter().flatten().zip(back.cells.iter().flatten()) {
            assert!((a - b).abs() <= a.abs() * 1e-11, "{a} vs {b}");
        }
    }
}
