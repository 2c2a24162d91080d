//! Artificial double-articulated languages over attribute-value meaning
//! spaces, symbol segmentation (HAS and BPE), and compositionality,
//! concatenativity and fusionality metrics.

pub mod config;
pub mod corpus;
pub mod error;
pub mod langgen;
pub mod metrics;
pub mod natural;
pub mod segment;

pub use config::{AttrValConfig, Preset};
pub use corpus::{
    enumerate_meanings, enumerate_meanings_capped, Char, Corpus, Meaning, Message,
    DEFAULT_MEANING_CAP,
};
pub use error::{Error, Result};
pub use langgen::{build_language, corpus_from_language, generate_corpus, KindSpec, Language, LanguageKind, LanguageSpec};
pub use segment::{Segmenter, SegmentedCorpus, VocabBudget};
