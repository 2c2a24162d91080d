//! Branching entropy and boundary detection from entropy changes.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use crate::corpus::{Char, Corpus};
use crate::error::{Error, Result};
use crate::segment::SegmentedCorpus;

/// The token following a context: a character or the end of the message.
pub type Next = Option<Char>;

/// Empirical next-token distributions keyed by context, with per-message
/// branching entropies in nats.
#[derive(Debug, Clone)]
pub struct EntropyModel {
    window: Option<usize>,
    counts: HashMap<Vec<Char>, BTreeMap<Next, u64>>,
    entropies: HashMap<Vec<Char>, f64>,
}

impl EntropyModel {
    /// Context length limit; `None` conditions on the full message prefix.
    pub fn window(&self) -> Option<usize> {
        self.window
    }

    /// The context used after reading `prefix`.
    pub fn context<'a>(&self, prefix: &'a [Char]) -> &'a [Char] {
        match self.window {
            Some(w) if prefix.len() > w => &prefix[prefix.len() - w..],
            _ => prefix,
        }
    }

    /// Branching entropy after `prefix`, if the context was observed.
    pub fn branching_entropy(&self, prefix: &[Char]) -> Option<f64> {
        self.entropies.get(self.context(prefix)).copied()
    }

    /// Maximum-likelihood next-token distribution after `prefix`.
    pub fn distribution(&self, prefix: &[Char]) -> Option<Vec<(Next, f64)>> {
        let counts = self.counts.get(self.context(prefix))?;
        let total: u64 = counts.values().sum();
        Some(
            counts
                .iter()
                .map(|(&k, &c)| (k, c as f64 / total as f64))
                .collect(),
        )
    }

    /// `H_0..=H_len` for one message: entropy after each prefix length.
    pub fn message_entropies(&self, message: &[Char]) -> Result<Vec<f64>> {
        (0..=message.len())
            .map(|i| {
                self.branching_entropy(&message[..i]).ok_or_else(|| {
                    Error::Parameter("entropy model was not fit on this corpus".into())
                })
            })
            .collect()
    }

    pub fn n_contexts(&self) -> usize {
        self.counts.len()
    }
}

/// Counts next-token occurrences after every prefix (or window) of every message.
pub fn fit_entropy(corpus: &Corpus, window: Option<usize>) -> EntropyModel {
    let mut counts: HashMap<Vec<Char>, BTreeMap<Next, u64>> = HashMap::new();
    for msg in corpus.messages() {
        for i in 0..=msg.len() {
            let start = match window {
                Some(w) if i > w => i - w,
                _ => 0,
            };
            let next = msg.get(i).copied();
            *counts
                .entry(msg[start..i].to_vec())
                .or_default()
                .entry(next)
                .or_insert(0) += 1;
        }
    }
    let entropies = counts
        .iter()
        .map(|(ctx, dist)| (ctx.clone(), entropy_of_counts(dist.values().copied())))
        .collect();
    EntropyModel {
        window,
        counts,
        entropies,
    }
}

fn entropy_of_counts(counts: impl Iterator<Item = u64> + Clone) -> f64 {
    let total: u64 = counts.clone().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let h = counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum::<f64>();
    h.max(0.0)
}

/// Direction of the entropy change that marks a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HasConvention {
    /// Cut after position `i` when `H_i - H_{i-1} > tau` (entropy rises).
    #[default]
    Rise,
    /// Cut after position `i` when `H_{i-1} - H_i > tau`.
    Verbatim,
}

impl FromStr for HasConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rise" => Ok(HasConvention::Rise),
            "verbatim" => Ok(HasConvention::Verbatim),
            other => Err(Error::Parameter(format!("unknown HAS convention `{other}`"))),
        }
    }
}

/// Segments each message at cut indices `i` in `(0, len)` where the branching
/// entropy changes by more than `tau` in the direction set by `convention`.
pub fn has_segment(
    corpus: &Corpus,
    model: &EntropyModel,
    tau: f64,
    convention: HasConvention,
) -> Result<SegmentedCorpus> {
    let boundaries = corpus
        .messages()
        .map(|msg| {
            let h = model.message_entropies(msg)?;
            let cuts = (1..msg.len())
                .filter(|&i| {
                    let delta = match convention {
                        HasConvention::Rise => h[i] - h[i - 1],
                        HasConvention::Verbatim => h[i - 1] - h[i],
                    };
                    delta > tau
                })
                .collect();
            Ok(cuts)
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    SegmentedCorpus::new(corpus.clone(), boundaries)
}
