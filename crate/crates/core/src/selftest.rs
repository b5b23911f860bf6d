//! Robustness battery: six malformed or incomplete variants of a reference
//! record, each with an expected outcome.

use chrono::{DateTime, Utc};

use crate::dataset::{parse_corpus, ActorHistories, SideTable};
use crate::domain::{AssessmentConfig, DeveloperHistory, Field, PublisherHistory};
use crate::error::ConfigError;
use crate::pipeline::assess_rows;

/// Corpus text holding the reference record.
pub const REFERENCE_CORPUS: &str = "\
Sample,Code Length,Developer,Publisher,Year,Language,Update Frequency,Forks,Downloads,\
Unresolved Vulnerabilities,Known Vulnerabilities,Dependencies,Rating,Code Coverage,Context
1,304,W,Z,2018,Java,0.08424,2003,20455,135,7556,28,7153,0.99,0.2
";

/// Histories of the reference record's actors.
pub fn reference_histories() -> SideTable {
    SideTable {
        developers: vec![DeveloperHistory {
            developer_id: "W".into(),
            total_vulnerabilities: 96912,
            software_count: 129,
            software_count_same_language: 33,
            years_in_language: 2,
            years_total: 2,
        }],
        publishers: vec![PublisherHistory {
            publisher_id: "Z".into(),
            published_count: 123,
            years_publishing: 2,
        }],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Score,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub number: u8,
    pub name: &'static str,
    pub expected: Expect,
    pub passed: bool,
    pub detail: String,
}

type Edit = fn(&mut Vec<String>);

fn set(cells: &mut [String], field: Field, value: &str) {
    cells[field.index()] = value.to_owned();
}

const CASES: [(&str, Expect, Edit); 6] = [
    ("missing dependencies", Expect::Score, |c| {
        set(c, Field::Dependencies, "")
    }),
    ("code coverage above 1", Expect::Error, |c| {
        set(c, Field::CodeCoverage, "1.3")
    }),
    ("context outside the table", Expect::Error, |c| {
        set(c, Field::Context, "0.4")
    }),
    // Replaced by the exhaustive five-blank sweep in `run_battery`.
    ("five blank cells", Expect::Score, |_| {}),
    ("multiple developers in one cell", Expect::Score, |c| {
        set(c, Field::Developer, "\"3,5,10\"")
    }),
    ("decimal downloads", Expect::Error, |c| {
        set(c, Field::Downloads, "3.5")
    }),
];

fn reference_cells() -> Vec<String> {
    REFERENCE_CORPUS
        .lines()
        .nth(1)
        .expect("reference row")
        .split(',')
        .map(str::to_owned)
        .collect()
}

/// Runs the six checks. The five-blank check covers every choice of five
/// non-identifier columns.
pub fn run_battery(
    config: &AssessmentConfig,
    now: DateTime<Utc>,
) -> Result<Vec<CheckOutcome>, ConfigError> {
    config.validate()?;
    let mut histories = ActorHistories::default();
    histories.apply_side_table(reference_histories());
    let header = REFERENCE_CORPUS.lines().next().expect("header");

    let mut outcomes = Vec::new();
    for (i, (name, expected, edit)) in CASES.into_iter().enumerate() {
        let number = i as u8 + 1;
        let variants: Vec<Vec<String>> = if number == 4 {
            five_blank_variants()
        } else {
            let mut cells = reference_cells();
            edit(&mut cells);
            vec![cells]
        };
        let text: String = std::iter::once(header.to_owned())
            .chain(variants.iter().map(|c| c.join(",")))
            .map(|l| l + "\n")
            .collect();
        let rows = parse_corpus(text.as_bytes()).expect("reference header");
        let results = assess_rows(&rows, &histories, config, now)?;
        let failures: Vec<String> = results
            .iter()
            .filter_map(|r| match (r, expected) {
                (Ok(b), Expect::Score) if (0.0..=1.0).contains(&b.final_risk_penalized) => None,
                (Ok(b), Expect::Score) => {
                    Some(format!("score {} out of range", b.final_risk_penalized))
                }
                (Err(e), Expect::Score) => Some(e.to_string()),
                (Err(_), Expect::Error) => None,
                (Ok(b), Expect::Error) => Some(format!(
                    "scored {} instead of failing",
                    b.final_risk_penalized
                )),
            })
            .collect();
        let detail = match failures.first() {
            None if variants.len() > 1 => format!("{} variants as expected", variants.len()),
            None => match &results[0] {
                Ok(b) => format!("scored {:.6}", b.final_risk_penalized),
                Err(e) => e.to_string(),
            },
            Some(first) => format!(
                "{} of {} variants wrong; first: {first}",
                failures.len(),
                variants.len()
            ),
        };
        outcomes.push(CheckOutcome {
            number,
            name,
            expected,
            passed: failures.is_empty(),
            detail,
        });
    }
    Ok(outcomes)
}

fn five_blank_variants() -> Vec<Vec<String>> {
    let columns: Vec<usize> = Field::ALL
        .iter()
        .filter(|&&f| f != Field::Sample)
        .map(|f| f.index())
        .collect();
    let mut out = Vec::new();
    let mut pick = [0usize, 1, 2, 3, 4];
    loop {
        let mut cells = reference_cells();
        for &p in &pick {
            cells[columns[p]].clear();
        }
        out.push(cells);
        // Next combination in lexicographic order.
        let n = columns.len();
        let Some(i) = (0..5).rev().find(|&i| pick[i] < n - 5 + i) else {
            break;
        };
        pick[i] += 1;
        for j in i + 1..5 {
            pick[j] = pick[j - 1] + 1;
        }
    }
    out
}
