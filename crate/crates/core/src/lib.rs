//! Duplicate detection for tabular knowledge bases.
//!
//! Every non-id attribute of a record pair is compared with its configured
//! comparator, the similarity is mapped onto a per-attribute probability and
//! the probabilities are fused with Bayes' rule. Pairs whose combined
//! probability reaches the threshold become identity links. Candidate pairs
//! come from an inverted token index over the free-text attributes.
//!
//! ```
//! use dedupe_kb::{ingest, matcher};
//!
//! let config = ingest::default_config();
//! let csv = "id,title,district\nr1,Casa en Gonnet,Gonnet\nr2,casa en  gonnet,GONNET\n";
//! let kb = ingest::read_kb(csv.as_bytes(), &config).unwrap();
//! let links = matcher::deduplicate(&kb, &config).unwrap();
//! assert!(links.contains("r1", "r2"));
//! ```

pub mod blocking;
pub mod cleaning;
pub mod cli;
pub mod comparators;
pub mod evaluation;
pub mod groundtruth;
pub mod ingest;
pub mod matcher;
pub mod record;

pub use evaluation::{evaluate, ConfusionCounts, EvaluationReport};
pub use groundtruth::{generate_ground_truth, DuplicateGroup, GroundTruth};
pub use ingest::{default_config, load_config, load_kb, load_links, write_links, KnowledgeBase};
pub use matcher::{compare_records, deduplicate, deduplicate_with, PairVerdict};
pub use record::{AttributeSpec, ComparatorKind, Link, LinkSet, MatchConfig, Record};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Match(#[from] matcher::MatchError),
    #[error(transparent)]
    GroundTruth(#[from] groundtruth::GroundTruthError),
    #[error(transparent)]
    Config(#[from] record::ConfigError),
    #[error("unknown record id {0:?}")]
    UnknownRecord(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Match(
                matcher::MatchError::ContradictoryCertainty | matcher::MatchError::Pool(_)
            )
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
