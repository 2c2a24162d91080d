//! Bag-of-symbols and positional disentanglement.

use std::collections::HashMap;

use crate::corpus::{Char, Corpus};
use crate::error::{Error, Result};
use crate::metrics::info::{entropy, mutual_information};
use crate::segment::SegmentedCorpus;

/// Character-level ratios below this are reported as low confidence.
pub const LOW_CONFIDENCE_BOSDIS: f64 = 0.005;

/// Symbol vocabulary over which bag-of-symbols counts are taken.
#[derive(Debug, Clone, Copy)]
pub enum Vocabulary<'a> {
    Characters,
    Segments(&'a SegmentedCorpus),
}

/// Normalised gap between the best and second-best attribute MI with `feature`.
/// `None` when the feature is constant.
fn information_gap(attributes: &[Vec<u32>], feature: &[u64]) -> Option<f64> {
    let h = entropy(feature);
    if h <= 0.0 {
        return None;
    }
    let mut mi: Vec<f64> = attributes
        .iter()
        .map(|attr| mutual_information(feature, attr))
        .collect();
    mi.sort_by(|a, b| b.total_cmp(a));
    Some((mi[0] - mi[1]) / h)
}

/// Column-major attribute values.
fn attribute_columns(corpus: &Corpus) -> Result<Vec<Vec<u32>>> {
    let n = corpus.config().n_attributes();
    if n < 2 {
        return Err(Error::Metric(
            "disentanglement needs at least two attributes".into(),
        ));
    }
    Ok((0..n)
        .map(|a| corpus.meanings().map(|m| m[a]).collect())
        .collect())
}

fn mean_gap(attributes: &[Vec<u32>], features: impl Iterator<Item = Vec<u64>>) -> f64 {
    let gaps: Vec<f64> = features
        .filter_map(|f| information_gap(attributes, &f))
        .collect();
    if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    }
}

/// Bag-of-symbols disentanglement. Symbols whose per-message count is constant
/// are excluded from both the sum and the vocabulary size.
pub fn bosdis(corpus: &Corpus, vocabulary: Vocabulary<'_>) -> Result<f64> {
    corpus.require_pairs("BoSDis")?;
    let attributes = attribute_columns(corpus)?;
    let rows: Vec<Vec<&[Char]>> = match vocabulary {
        Vocabulary::Characters => corpus
            .messages()
            .map(|m| m.chunks(1).collect())
            .collect(),
        Vocabulary::Segments(seg) => {
            if seg.base().pairs() != corpus.pairs() {
                return Err(Error::Metric(
                    "segmentation belongs to a different corpus".into(),
                ));
            }
            seg.iter_segments().collect()
        }
    };
    let mut index: HashMap<&[Char], usize> = HashMap::new();
    let mut symbols: Vec<&[Char]> = Vec::new();
    for row in &rows {
        for &s in row {
            index.entry(s).or_insert_with(|| {
                symbols.push(s);
                symbols.len() - 1
            });
        }
    }
    if symbols.is_empty() {
        return Err(Error::Metric("BoSDis over an empty vocabulary".into()));
    }
    let mut counts = vec![vec![0u64; rows.len()]; symbols.len()];
    for (r, row) in rows.iter().enumerate() {
        for s in row {
            counts[index[s]][r] += 1;
        }
    }
    Ok(mean_gap(&attributes, counts.into_iter()))
}

/// Positional disentanglement over characters. Position `j` only considers
/// messages long enough to have a character there; the sum is divided by the
/// configured maximum length.
pub fn posdis(corpus: &Corpus) -> Result<f64> {
    corpus.require_pairs("PosDis")?;
    let attributes = attribute_columns(corpus)?;
    let m = corpus.config().max_len();
    let mut total = 0.0;
    for j in 0..m {
        let rows: Vec<usize> = corpus
            .messages()
            .enumerate()
            .filter(|(_, msg)| msg.len() > j)
            .map(|(i, _)| i)
            .collect();
        if rows.is_empty() {
            continue;
        }
        let feature: Vec<u64> = rows
            .iter()
            .map(|&i| u64::from(corpus.pairs()[i].1[j]))
            .collect();
        let attrs: Vec<Vec<u32>> = attributes
            .iter()
            .map(|col| rows.iter().map(|&i| col[i]).collect())
            .collect();
        if let Some(gap) = information_gap(&attrs, &feature) {
            total += gap;
        }
    }
    Ok(total / m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioConfidence {
    Normal,
    /// Character-level BoSDis below [`LOW_CONFIDENCE_BOSDIS`].
    Low,
    /// Character-level BoSDis is zero; the value is infinite or NaN.
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosdisRatio {
    pub value: f64,
    pub segmented: f64,
    pub characters: f64,
    pub confidence: RatioConfidence,
}

impl BosdisRatio {
    pub fn from_parts(segmented: f64, characters: f64) -> Self {
        let confidence = if characters <= 0.0 {
            RatioConfidence::Unstable
        } else if characters < LOW_CONFIDENCE_BOSDIS {
            RatioConfidence::Low
        } else {
            RatioConfidence::Normal
        };
        BosdisRatio {
            value: segmented / characters,
            segmented,
            characters,
            confidence,
        }
    }

    /// Strictly greater than one.
    pub fn is_meaningful(&self) -> bool {
        self.value > 1.0
    }
}

/// BoSDis over segments divided by BoSDis over characters.
pub fn bosdis_ratio(corpus: &Corpus, segmented: &SegmentedCorpus) -> Result<BosdisRatio> {
    let chars = bosdis(corpus, Vocabulary::Characters)?;
    let segs = bosdis(corpus, Vocabulary::Segments(segmented))?;
    Ok(BosdisRatio::from_parts(segs, chars))
}
