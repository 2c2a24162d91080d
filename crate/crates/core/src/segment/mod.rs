//! Symbol segmentation of message corpora.

mod bpe;
mod entropy;
mod segmented;

pub use bpe::{bpe_apply, bpe_train, MergeList, VocabBudget};
pub use entropy::{fit_entropy, has_segment, EntropyModel, HasConvention, Next};
pub use segmented::{SegmentedCorpus, SEGMENTED_HEADER};

use std::fmt;
use std::str::FromStr;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// A segmentation procedure applied to a whole corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segmenter {
    Has {
        tau: f64,
        convention: HasConvention,
        window: Option<usize>,
    },
    Bpe(VocabBudget),
}

impl Segmenter {
    pub fn has(tau: f64) -> Self {
        Segmenter::Has {
            tau,
            convention: HasConvention::default(),
            window: None,
        }
    }

    pub fn segment(&self, corpus: &Corpus) -> Result<SegmentedCorpus> {
        match *self {
            Segmenter::Has {
                tau,
                convention,
                window,
            } => has_segment(corpus, &fit_entropy(corpus, window), tau, convention),
            Segmenter::Bpe(budget) => bpe_apply(&bpe_train(corpus, budget)?, corpus),
        }
    }
}

impl fmt::Display for Segmenter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segmenter::Has { .. } => f.write_str("has"),
            Segmenter::Bpe(b) => write!(f, "bpe{b}"),
        }
    }
}

/// `has`, `bpe96`, `bpemax`. HAS parses with τ = 0 and the default convention.
impl FromStr for Segmenter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "has" {
            return Ok(Segmenter::has(0.0));
        }
        lower
            .strip_prefix("bpe")
            .and_then(|b| b.parse::<VocabBudget>().ok())
            .map(Segmenter::Bpe)
            .ok_or_else(|| Error::Parameter(format!("unknown segmenter `{s}` (has, bpe<N>, bpemax)")))
    }
}
