//! Meanings, messages, corpora and the corpus TSV format.
//!
//! A corpus file is UTF-8 with a `meaning\tmessage` header; each row holds the
//! comma-separated attribute values, a TAB, and the comma-separated characters.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::ops::Deref;
use std::path::Path;

use crate::config::{join, parse_list, AttrValConfig};
use crate::error::{Error, Result};

/// Character of the message alphabet.
pub type Char = u32;

/// Default ceiling on the number of enumerated meanings.
pub const DEFAULT_MEANING_CAP: u64 = 1_000_000;

pub const CORPUS_HEADER: &str = "meaning\tmessage";

/// One point of the attribute-value product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Meaning(pub Vec<u32>);

impl Deref for Meaning {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for Meaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.0))
    }
}

impl Meaning {
    /// Checks arity and per-attribute bounds against `config`.
    pub fn conforms_to(&self, config: &AttrValConfig) -> Result<()> {
        if self.0.len() != config.n_attributes() {
            return Err(Error::Corpus(format!(
                "meaning ({self}) has {} attributes, expected {}",
                self.0.len(),
                config.n_attributes()
            )));
        }
        for (i, (&v, &card)) in self.0.iter().zip(config.cardinalities()).enumerate() {
            if v as usize >= card {
                return Err(Error::Corpus(format!(
                    "meaning ({self}): attribute {i} value {v} out of range 0..{card}"
                )));
            }
        }
        Ok(())
    }

    /// Mixed-radix rank of the meaning in lexicographic enumeration order.
    pub fn index(&self, config: &AttrValConfig) -> usize {
        self.0
            .iter()
            .zip(config.cardinalities())
            .fold(0usize, |acc, (&v, &card)| acc * card + v as usize)
    }
}

/// A sequence of characters drawn from `[0, vocab_size)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message(pub Vec<Char>);

impl Deref for Message {
    type Target = [Char];
    fn deref(&self) -> &[Char] {
        &self.0
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.0))
    }
}

impl From<Vec<Char>> for Message {
    fn from(v: Vec<Char>) -> Self {
        Message(v)
    }
}

/// Full Cartesian product of the attribute sets in lexicographic order.
pub fn enumerate_meanings(config: &AttrValConfig) -> Result<Vec<Meaning>> {
    enumerate_meanings_capped(config, DEFAULT_MEANING_CAP)
}

pub fn enumerate_meanings_capped(config: &AttrValConfig, cap: u64) -> Result<Vec<Meaning>> {
    let size = config.n_meanings();
    if size > cap as u128 {
        return Err(Error::Size { size, cap });
    }
    let cards = config.cardinalities();
    let total = size as usize;
    let mut out = Vec::with_capacity(total);
    let mut current = vec![0u32; cards.len()];
    for _ in 0..total {
        out.push(Meaning(current.clone()));
        // odometer increment, last attribute fastest
        for i in (0..cards.len()).rev() {
            current[i] += 1;
            if (current[i] as usize) < cards[i] {
                break;
            }
            current[i] = 0;
        }
    }
    Ok(out)
}

/// Aligned (meaning, message) pairs under one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    config: AttrValConfig,
    pairs: Vec<(Meaning, Message)>,
    metadata: BTreeMap<String, String>,
}

impl Corpus {
    /// Validates every pair against `config` and rejects duplicate meanings.
    pub fn new(config: AttrValConfig, pairs: Vec<(Meaning, Message)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for (row, (meaning, message)) in pairs.iter().enumerate() {
            meaning.conforms_to(&config)?;
            check_message(message, &config)
                .map_err(|msg| Error::Corpus(format!("pair {row}: {msg}")))?;
            if !seen.insert(meaning) {
                return Err(Error::Corpus(format!("duplicate meaning ({meaning})")));
            }
        }
        Ok(Corpus {
            config,
            pairs,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn config(&self) -> &AttrValConfig {
        &self.config
    }

    pub fn pairs(&self) -> &[(Meaning, Message)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn meanings(&self) -> impl ExactSizeIterator<Item = &Meaning> + '_ {
        self.pairs.iter().map(|(m, _)| m)
    }

    pub fn messages(&self) -> impl ExactSizeIterator<Item = &Message> + '_ {
        self.pairs.iter().map(|(_, m)| m)
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn mean_message_len(&self) -> f64 {
        if self.pairs.is_empty() {
            return 0.0;
        }
        let total: usize = self.messages().map(|m| m.len()).sum();
        total as f64 / self.pairs.len() as f64
    }

    /// Metric entry points need at least two pairs.
    pub(crate) fn require_pairs(&self, what: &str) -> Result<()> {
        if self.pairs.len() < 2 {
            return Err(Error::Metric(format!(
                "{what} needs at least 2 pairs, corpus has {}",
                self.pairs.len()
            )));
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(self.pairs.len() * 32);
        out.push_str(CORPUS_HEADER);
        out.push('\n');
        for (meaning, message) in &self.pairs {
            out.push_str(&meaning.to_string());
            out.push('\t');
            out.push_str(&message.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses corpus TSV text. Without a `config` the cardinalities, vocabulary
    /// size and maximum length are inferred from the observed values.
    pub fn from_tsv(text: &str, config: Option<&AttrValConfig>, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end_matches('\r') == CORPUS_HEADER => {}
            Some(_) => {
                return Err(Error::parse(
                    origin,
                    1,
                    "expected header `meaning\\tmessage`".to_string(),
                ))
            }
            None => return Err(Error::parse(origin, 1, "no pairs")),
        }
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in lines {
            let lineno = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let (m, s) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, lineno, "expected two TAB-separated fields"))?;
            let meaning = parse_list::<u32>(m)
                .filter(|v| !v.is_empty())
                .ok_or_else(|| Error::parse(origin, lineno, format!("malformed meaning `{m}`")))?;
            let message = parse_list::<Char>(s)
                .ok_or_else(|| Error::parse(origin, lineno, format!("malformed message `{s}`")))?;
            let meaning = Meaning(meaning);
            let message = Message(message);
            if let Some(config) = config {
                meaning
                    .conforms_to(config)
                    .map_err(|e| Error::parse(origin, lineno, strip_prefix(e)))?;
                check_message(&message, config).map_err(|e| Error::parse(origin, lineno, e))?;
            }
            if !seen.insert(meaning.clone()) {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("duplicate meaning ({meaning})"),
                ));
            }
            pairs.push((meaning, message));
        }
        if pairs.is_empty() {
            return Err(Error::parse(origin, 1, "no pairs"));
        }
        let config = match config {
            Some(c) => c.clone(),
            None => infer_config(&pairs).map_err(|e| Error::parse(origin, 0, strip_prefix(e)))?,
        };
        let corpus = Corpus::new(config, pairs)?;
        Ok(corpus.with_metadata("source", origin))
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

fn check_message(message: &Message, config: &AttrValConfig) -> std::result::Result<(), String> {
    if message.len() > config.max_len() {
        return Err(format!(
            "message ({message}) longer than max_len {}",
            config.max_len()
        ));
    }
    if let Some(&c) = message.iter().find(|&&c| c as usize >= config.vocab_size()) {
        return Err(format!(
            "message ({message}): character {c} outside vocabulary 0..{}",
            config.vocab_size()
        ));
    }
    Ok(())
}

fn infer_config(pairs: &[(Meaning, Message)]) -> Result<AttrValConfig> {
    let n = pairs[0].0.len();
    let mut cards = vec![1usize; n];
    let mut vocab = 2usize;
    let mut max_len = 1usize;
    for (meaning, message) in pairs {
        if meaning.len() != n {
            return Err(Error::Corpus(format!(
                "meaning ({meaning}) has {} attributes, expected {n}",
                meaning.len()
            )));
        }
        for (c, &v) in cards.iter_mut().zip(meaning.iter()) {
            *c = (*c).max(v as usize + 1);
        }
        if let Some(&top) = message.iter().max() {
            vocab = vocab.max(top as usize + 1);
        }
        max_len = max_len.max(message.len());
    }
    AttrValConfig::new(cards, vocab, max_len)
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Corpus(msg) | Error::Config(msg) => msg,
        other => other.to_string(),
    }
}
