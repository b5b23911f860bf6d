//! Seeded synthetic corpus generation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::CorpusRow;
use crate::domain::Field;

pub const LANGUAGES: [&str; 3] = ["C", "Python", "Java"];
pub const CONTEXTS: [&str; 3] = ["0.2", "0.3", "0.5"];
pub const YEARS: (i32, i32) = (2016, 2023);
pub const CODE_LENGTH: (u64, u64) = (40, 700);
pub const FORKS: (u64, u64) = (0, 5000);
pub const DOWNLOADS: (u64, u64) = (100, 100_000);
pub const KNOWN_VULNERABILITIES: (u64, u64) = (0, 12_000);
pub const MAX_UNRESOLVED: u64 = 1000;
pub const DEPENDENCIES: (u64, u64) = (0, 30);
/// Ratings are drawn up to this share of downloads.
pub const MAX_RATING_SHARE: f64 = 0.6;
/// Update frequency is `k / UPDATE_FREQUENCY_STEPS` for `k` in `1..=STEPS`.
pub const UPDATE_FREQUENCY_STEPS: u32 = 100_000;

/// Describes how a generated corpus was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorManifest {
    pub generator: String,
    pub seed: u64,
    pub count: usize,
    pub rng: String,
    pub columns: Vec<ColumnDistribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDistribution {
    pub column: String,
    pub distribution: String,
}

impl GeneratorManifest {
    pub fn new(count: usize, seed: u64) -> Self {
        let col = |f: Field, d: String| ColumnDistribution {
            column: f.column().to_owned(),
            distribution: d,
        };
        Self {
            generator: concat!("trustrisk-core ", env!("CARGO_PKG_VERSION")).to_owned(),
            seed,
            count,
            rng: "ChaCha8 seeded from u64".to_owned(),
            columns: vec![
                col(Field::Sample, "sequential 1..=count".into()),
                col(
                    Field::CodeLength,
                    format!("uniform integer [{}, {}]", CODE_LENGTH.0, CODE_LENGTH.1),
                ),
                col(Field::Developer, "uniform over letters A-Z".into()),
                col(
                    Field::Publisher,
                    "uniform over letters A-Z, independent of developer".into(),
                ),
                col(
                    Field::Year,
                    format!("uniform integer [{}, {}]", YEARS.0, YEARS.1),
                ),
                col(Field::Language, format!("uniform over {LANGUAGES:?}")),
                col(
                    Field::UpdateFrequency,
                    format!(
                        "k/{UPDATE_FREQUENCY_STEPS}, k uniform in [1, {UPDATE_FREQUENCY_STEPS}]"
                    ),
                ),
                col(
                    Field::Forks,
                    format!("uniform integer [{}, {}]", FORKS.0, FORKS.1),
                ),
                col(
                    Field::Downloads,
                    format!("uniform integer [{}, {}]", DOWNLOADS.0, DOWNLOADS.1),
                ),
                col(
                    Field::UnresolvedVulnerabilities,
                    format!("uniform integer [0, min(known, {MAX_UNRESOLVED})]"),
                ),
                col(
                    Field::KnownVulnerabilities,
                    format!(
                        "uniform integer [{}, {}]",
                        KNOWN_VULNERABILITIES.0, KNOWN_VULNERABILITIES.1
                    ),
                ),
                col(
                    Field::Dependencies,
                    format!("uniform integer [{}, {}]", DEPENDENCIES.0, DEPENDENCIES.1),
                ),
                col(
                    Field::Rating,
                    format!("uniform integer [0, floor({MAX_RATING_SHARE} * downloads)]"),
                ),
                col(Field::CodeCoverage, "k/100, k uniform in [0, 100]".into()),
                col(Field::Context, format!("uniform over {CONTEXTS:?}")),
            ],
        }
    }
}

/// Generates `count` rows deterministically from `seed`.
pub fn generate_synthetic(count: usize, seed: u64) -> Vec<CorpusRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=count).map(|i| synthetic_row(&mut rng, i)).collect()
}

fn letter(rng: &mut impl Rng) -> String {
    char::from(b'A' + rng.gen_range(0..26u8)).to_string()
}

fn synthetic_row(rng: &mut impl Rng, sample: usize) -> CorpusRow {
    let mut row = CorpusRow::new(0);
    let known = rng.gen_range(KNOWN_VULNERABILITIES.0..=KNOWN_VULNERABILITIES.1);
    let downloads = rng.gen_range(DOWNLOADS.0..=DOWNLOADS.1);
    let max_rating = (downloads as f64 * MAX_RATING_SHARE).floor() as u64;

    row.set(Field::Sample, sample.to_string());
    row.set(
        Field::CodeLength,
        rng.gen_range(CODE_LENGTH.0..=CODE_LENGTH.1).to_string(),
    );
    row.set(Field::Developer, letter(rng));
    row.set(Field::Publisher, letter(rng));
    row.set(Field::Year, rng.gen_range(YEARS.0..=YEARS.1).to_string());
    row.set(Field::Language, *LANGUAGES.choose(rng).expect("nonempty"));
    let k = rng.gen_range(1..=UPDATE_FREQUENCY_STEPS);
    row.set(
        Field::UpdateFrequency,
        (f64::from(k) / f64::from(UPDATE_FREQUENCY_STEPS)).to_string(),
    );
    row.set(Field::Forks, rng.gen_range(FORKS.0..=FORKS.1).to_string());
    row.set(Field::Downloads, downloads.to_string());
    row.set(
        Field::UnresolvedVulnerabilities,
        rng.gen_range(0..=known.min(MAX_UNRESOLVED)).to_string(),
    );
    row.set(Field::KnownVulnerabilities, known.to_string());
    row.set(
        Field::Dependencies,
        rng.gen_range(DEPENDENCIES.0..=DEPENDENCIES.1).to_string(),
    );
    row.set(Field::Rating, rng.gen_range(0..=max_rating).to_string());
    row.set(
        Field::CodeCoverage,
        (f64::from(rng.gen_range(0..=100u32)) / 100.0).to_string(),
    );
    row.set(Field::Context, *CONTEXTS.choose(rng).expect("nonempty"));
    row
}
