//! Corpus ingestion, history derivation and synthetic data.

mod corpus;
mod histories;
mod synthetic;

pub use corpus::{
    actor_ids, header, parse_corpus, to_record, write_corpus, CorpusRow, RowError, RowProblem,
};
pub use histories::{
    derive_histories, parse_side_table, ActorHistories, HistoryDerivationRule, SideTable,
    SIDE_TABLE_HEADER,
};
pub use synthetic::{generate_synthetic, ColumnDistribution, GeneratorManifest};

/// Generation constants, re-exported for range checks.
pub mod synthetic_ranges {
    pub use super::synthetic::{
        CODE_LENGTH, CONTEXTS, DEPENDENCIES, DOWNLOADS, FORKS, KNOWN_VULNERABILITIES, LANGUAGES,
        MAX_RATING_SHARE, MAX_UNRESOLVED, UPDATE_FREQUENCY_STEPS, YEARS,
    };
}
