use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::config::{join, parse_list, AttrValConfig};
use crate::corpus::{Char, Corpus, Message};
use crate::error::{Error, Result};

pub const SEGMENTED_HEADER: &str = "meaning\tmessage\tboundaries";

/// A corpus whose messages carry sorted cut indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedCorpus {
    base: Corpus,
    boundaries: Vec<Vec<usize>>,
    symbol_vocab: BTreeSet<Vec<Char>>,
}

impl SegmentedCorpus {
    /// Each boundary list must be strictly increasing within `(0, len)`.
    pub fn new(base: Corpus, boundaries: Vec<Vec<usize>>) -> Result<Self> {
        if boundaries.len() != base.len() {
            return Err(Error::Corpus(format!(
                "{} boundary lists for {} messages",
                boundaries.len(),
                base.len()
            )));
        }
        for (i, (cuts, msg)) in boundaries.iter().zip(base.messages()).enumerate() {
            check_cuts(cuts, msg).map_err(|e| Error::Corpus(format!("message {i}: {e}")))?;
        }
        let symbol_vocab = boundaries
            .iter()
            .zip(base.messages())
            .flat_map(|(cuts, msg)| split(msg, cuts).into_iter().map(<[Char]>::to_vec))
            .collect();
        Ok(SegmentedCorpus {
            base,
            boundaries,
            symbol_vocab,
        })
    }

    pub fn base(&self) -> &Corpus {
        &self.base
    }

    pub fn boundaries(&self) -> &[Vec<usize>] {
        &self.boundaries
    }

    /// The set of distinct segments that occur in the corpus.
    pub fn symbol_vocab(&self) -> &BTreeSet<Vec<Char>> {
        &self.symbol_vocab
    }

    pub fn segments(&self, index: usize) -> Vec<&[Char]> {
        split(&self.base.pairs()[index].1, &self.boundaries[index])
    }

    pub fn iter_segments(&self) -> impl Iterator<Item = Vec<&[Char]>> + '_ {
        (0..self.base.len()).map(|i| self.segments(i))
    }

    /// Mean number of cuts per message.
    pub fn mean_boundaries(&self) -> f64 {
        if self.boundaries.is_empty() {
            return 0.0;
        }
        let total: usize = self.boundaries.iter().map(Vec::len).sum();
        total as f64 / self.boundaries.len() as f64
    }

    /// Mean number of segments per message; empty messages count zero segments.
    pub fn mean_segments(&self) -> f64 {
        if self.boundaries.is_empty() {
            return 0.0;
        }
        let total: usize = self
            .boundaries
            .iter()
            .zip(self.base.messages())
            .map(|(cuts, msg)| if msg.is_empty() { 0 } else { cuts.len() + 1 })
            .sum();
        total as f64 / self.boundaries.len() as f64
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(SEGMENTED_HEADER);
        out.push('\n');
        for ((meaning, message), cuts) in self.base.pairs().iter().zip(&self.boundaries) {
            out.push_str(&format!("{meaning}\t{message}\t{}\n", join(cuts)));
        }
        out
    }

    pub fn from_tsv(text: &str, config: Option<&AttrValConfig>, origin: &str) -> Result<Self> {
        let mut corpus_text = String::from(crate::corpus::CORPUS_HEADER);
        corpus_text.push('\n');
        let mut boundaries = Vec::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end_matches('\r') == SEGMENTED_HEADER => {}
            _ => {
                return Err(Error::parse(
                    origin,
                    1,
                    "expected header `meaning\\tmessage\\tboundaries`",
                ))
            }
        }
        for (i, raw) in lines {
            let line = raw.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let (pair, cuts) = line
                .rsplit_once('\t')
                .filter(|(p, _)| p.contains('\t'))
                .ok_or_else(|| Error::parse(origin, i + 1, "expected three TAB-separated fields"))?;
            let cuts = parse_list::<usize>(cuts)
                .ok_or_else(|| Error::parse(origin, i + 1, format!("malformed boundaries `{cuts}`")))?;
            let msg = Message(
                parse_list::<Char>(pair.split_once('\t').map(|x| x.1).unwrap_or_default())
                    .unwrap_or_default(),
            );
            check_cuts(&cuts, &msg).map_err(|e| Error::parse(origin, i + 1, e))?;
            corpus_text.push_str(pair);
            corpus_text.push('\n');
            boundaries.push(cuts);
        }
        let base = Corpus::from_tsv(&corpus_text, config, origin)?;
        SegmentedCorpus::new(base, boundaries)
    }

    pub fn read(path: impl AsRef<Path>, config: Option<&AttrValConfig>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv(&text, config, &path.display().to_string())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

fn check_cuts(cuts: &[usize], msg: &[Char]) -> std::result::Result<(), String> {
    let mut prev = 0;
    for &c in cuts {
        if c <= prev || c >= msg.len() {
            return Err(format!(
                "boundaries {} not strictly increasing within (0, {})",
                join(cuts),
                msg.len()
            ));
        }
        prev = c;
    }
    Ok(())
}

fn split<'a>(msg: &'a [Char], cuts: &[usize]) -> Vec<&'a [Char]> {
    if msg.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for &c in cuts {
        out.push(&msg[start..c]);
        start = c;
    }
    out.push(&msg[start..]);
    out
}
