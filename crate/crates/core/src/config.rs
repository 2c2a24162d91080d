//! Attribute-value game configuration and its `key=value` file format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Cardinalities of the attribute sets, character vocabulary and message length.
#[derive(Debug, Clone, PartialEq)]
pub struct AttrValConfig {
    cardinalities: Vec<usize>,
    vocab_size: usize,
    max_len: usize,
    attribute_weights: Vec<f64>,
}

/// Named configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Three attributes of 16 values each.
    Default,
    /// A 42-valued root attribute plus 2 tenses and 3 persons.
    Inflection,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Preset::Default),
            "inflection" => Ok(Preset::Inflection),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Default => "default",
            Preset::Inflection => "inflection",
        }
    }

    pub fn config(self) -> AttrValConfig {
        match self {
            Preset::Default => AttrValConfig::new(vec![16, 16, 16], 8, 9).expect("valid preset"),
            Preset::Inflection => AttrValConfig::new(vec![42, 2, 3], 8, 9)
                .and_then(|c| c.with_weights(vec![0.9, 0.05, 0.05]))
                .expect("valid preset"),
        }
    }
}

const WEIGHT_TOLERANCE: f64 = 1e-9;

impl AttrValConfig {
    /// Builds a config with uniform attribute weights.
    pub fn new(cardinalities: Vec<usize>, vocab_size: usize, max_len: usize) -> Result<Self> {
        if cardinalities.is_empty() {
            return Err(Error::Config("at least one attribute is required".into()));
        }
        if let Some(i) = cardinalities.iter().position(|&c| c == 0) {
            return Err(Error::Config(format!("attribute {i} has cardinality 0")));
        }
        if vocab_size < 2 {
            return Err(Error::Config(format!(
                "vocab_size must be at least 2, got {vocab_size}"
            )));
        }
        if max_len == 0 {
            return Err(Error::Config("max_len must be positive".into()));
        }
        let n = cardinalities.len();
        Ok(AttrValConfig {
            cardinalities,
            vocab_size,
            max_len,
            attribute_weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.cardinalities.len() {
            return Err(Error::Config(format!(
                "{} weights given for {} attributes",
                weights.len(),
                self.cardinalities.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("weights must be finite and non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Config(format!("weights sum to {sum}, expected 1")));
        }
        self.attribute_weights = weights;
        Ok(self)
    }

    pub fn with_vocab_size(self, vocab_size: usize) -> Result<Self> {
        let weights = self.attribute_weights.clone();
        AttrValConfig::new(self.cardinalities, vocab_size, self.max_len)?.with_weights(weights)
    }

    pub fn with_max_len(self, max_len: usize) -> Result<Self> {
        let weights = self.attribute_weights.clone();
        AttrValConfig::new(self.cardinalities, self.vocab_size, max_len)?.with_weights(weights)
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn n_attributes(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn attribute_weights(&self) -> &[f64] {
        &self.attribute_weights
    }

    /// Size of the meaning space, saturating instead of overflowing.
    pub fn n_meanings(&self) -> u128 {
        self.cardinalities
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }

    /// Renders the `key=value` config file.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cardinalities={}", join(&self.cardinalities));
        let _ = writeln!(out, "vocab_size={}", self.vocab_size);
        let _ = writeln!(out, "max_len={}", self.max_len);
        let _ = writeln!(out, "weights={}", join(&self.attribute_weights));
        out
    }

    /// Parses the `key=value` config file. Blank lines and `#` comments are ignored;
    /// `weights` is optional and defaults to uniform.
    pub fn parse_config(text: &str, origin: &str) -> Result<Self> {
        let mut cardinalities = None;
        let mut vocab_size = None;
        let mut max_len = None;
        let mut weights = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, lineno, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::parse(origin, lineno, format!("invalid {what}: `{value}`"));
            match key {
                "cardinalities" => {
                    cardinalities = Some(parse_list::<usize>(value).ok_or_else(|| bad(key))?)
                }
                "vocab_size" => vocab_size = Some(value.parse::<usize>().map_err(|_| bad(key))?),
                "max_len" => max_len = Some(value.parse::<usize>().map_err(|_| bad(key))?),
                "weights" => weights = Some(parse_list::<f64>(value).ok_or_else(|| bad(key))?),
                other => {
                    return Err(Error::parse(origin, lineno, format!("unknown key `{other}`")))
                }
            }
        }
        let missing = |k: &str| Error::parse(origin, 0, format!("missing key `{k}`"));
        let config = AttrValConfig::new(
            cardinalities.ok_or_else(|| missing("cardinalities"))?,
            vocab_size.ok_or_else(|| missing("vocab_size"))?,
            max_len.ok_or_else(|| missing("max_len"))?,
        )?;
        match weights {
            Some(w) => config.with_weights(w),
            None => Ok(config),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_config(&text, &path.display().to_string())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_config_string()).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub(crate) fn parse_list<T: FromStr>(s: &str) -> Option<Vec<T>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}
