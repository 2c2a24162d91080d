//! Natural-language inflection tables and the Attr-Val sublanguages sampled
//! from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::config::AttrValConfig;
use crate::corpus::{Char, Corpus, Meaning, Message};
use crate::error::{Error, Result};
use crate::metrics::bosdis_ratio;
use crate::segment::Segmenter;

/// Small synthetic table of regular Spanish -ar verbs, present and preterite
/// indicative, all six persons.
pub const SAMPLE_TABLE: &str = include_str!("../data/spanish_ar_sample.csv");

pub const TABLE_HEADER: [&str; 4] = ["lexeme", "tense", "person", "form"];
pub const ALPHABET_HEADER: &str = "id\tgrapheme";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionRecord {
    pub lexeme: String,
    pub tense: String,
    pub person: String,
    /// NFC-normalized surface form.
    pub form: String,
}

type Cell = (String, String, String);

#[derive(Debug, Clone)]
pub struct InflectionTable {
    records: Vec<InflectionRecord>,
    alphabet: Vec<String>,
    ids: BTreeMap<String, Char>,
    cells: BTreeMap<Cell, Vec<Char>>,
}

fn graphemes(form: &str) -> impl Iterator<Item = &str> {
    form.graphemes(true)
}

impl InflectionTable {
    /// Parses CSV bytes with the `lexeme,tense,person,form` header.
    pub fn parse(bytes: &[u8], origin: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let header = reader
            .byte_headers()
            .map_err(|e| Error::parse(origin, 1, e.to_string()))?
            .clone();
        let names: Vec<&[u8]> = header.iter().collect();
        if names != TABLE_HEADER.map(str::as_bytes) {
            return Err(Error::parse(
                origin,
                1,
                format!("expected header `{}`", TABLE_HEADER.join(",")),
            ));
        }

        let mut records = Vec::new();
        let mut seen = BTreeSet::new();
        for row in reader.byte_records() {
            let row = row.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::parse(origin, line, e.to_string())
            })?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            let mut fields = Vec::with_capacity(4);
            for (k, raw) in row.iter().enumerate() {
                let text = std::str::from_utf8(raw).map_err(|_| {
                    Error::parse(origin, line, format!("column `{}` is not UTF-8", TABLE_HEADER[k]))
                })?;
                fields.push(text.nfc().collect::<String>());
            }
            let [lexeme, tense, person, form]: [String; 4] = fields
                .try_into()
                .map_err(|_| Error::parse(origin, line, "expected 4 columns"))?;
            if form.is_empty() {
                return Err(Error::parse(origin, line, "empty form"));
            }
            if lexeme.is_empty() || tense.is_empty() || person.is_empty() {
                return Err(Error::parse(origin, line, "empty lexeme, tense or person"));
            }
            if !seen.insert((lexeme.clone(), tense.clone(), person.clone())) {
                return Err(Error::parse(
                    origin,
                    line,
                    format!("duplicate entry for {lexeme}/{tense}/{person}"),
                ));
            }
            records.push(InflectionRecord {
                lexeme,
                tense,
                person,
                form,
            });
        }
        if records.is_empty() {
            return Err(Error::parse(origin, 1, "no rows"));
        }
        Ok(Self::from_records(records))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&bytes, &path.display().to_string())
    }

    /// The bundled Spanish sample.
    pub fn sample() -> Self {
        Self::parse(SAMPLE_TABLE.as_bytes(), "spanish_ar_sample.csv").expect("bundled table parses")
    }

    fn from_records(records: Vec<InflectionRecord>) -> Self {
        let symbols: BTreeSet<&str> = records.iter().flat_map(|r| graphemes(&r.form)).collect();
        let alphabet: Vec<String> = symbols.into_iter().map(str::to_string).collect();
        let ids: BTreeMap<String, Char> = alphabet
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i as Char))
            .collect();
        let cells = records
            .iter()
            .map(|r| {
                let chars = graphemes(&r.form).map(|g| ids[g]).collect();
                ((r.lexeme.clone(), r.tense.clone(), r.person.clone()), chars)
            })
            .collect();
        InflectionTable {
            records,
            alphabet,
            ids,
            cells,
        }
    }

    pub fn records(&self) -> &[InflectionRecord] {
        &self.records
    }

    /// Grapheme clusters in id order.
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn lexemes(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.lexeme.as_str()).collect()
    }

    pub fn tenses(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.tense.as_str()).collect()
    }

    pub fn persons(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.person.as_str()).collect()
    }

    pub fn cell(&self, lexeme: &str, tense: &str, person: &str) -> Option<&[Char]> {
        self.cells
            .get(&(lexeme.to_string(), tense.to_string(), person.to_string()))
            .map(Vec::as_slice)
    }

    pub fn encode(&self, form: &str) -> Result<Vec<Char>> {
        let form: String = form.nfc().collect();
        graphemes(&form)
            .map(|g| {
                self.ids
                    .get(g)
                    .copied()
                    .ok_or_else(|| Error::Parameter(format!("grapheme `{g}` not in the alphabet")))
            })
            .collect()
    }

    pub fn decode(&self, chars: &[Char]) -> Result<String> {
        chars
            .iter()
            .map(|&c| {
                self.alphabet
                    .get(c as usize)
                    .map(String::as_str)
                    .ok_or_else(|| Error::Parameter(format!("character {c} not in the alphabet")))
            })
            .collect()
    }

    pub fn max_form_len(&self) -> usize {
        self.cells.values().map(Vec::len).max().unwrap_or(0)
    }

    /// `id\tgrapheme` sidecar.
    pub fn alphabet_tsv(&self) -> String {
        let mut out = format!("{ALPHABET_HEADER}\n");
        for (i, g) in self.alphabet.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{g}");
        }
        out
    }

    pub fn write_alphabet(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.alphabet_tsv()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleOptions {
    pub count: usize,
    pub seed: u64,
    pub n_roots: usize,
    /// Defaults to the first two tenses in table order.
    pub tenses: Option<Vec<String>>,
    /// Defaults to the first three persons in table order.
    pub persons: Option<Vec<String>>,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            count: 50,
            seed: 0,
            n_roots: 42,
            tenses: None,
            persons: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sublanguage {
    pub roots: Vec<String>,
    pub tenses: Vec<String>,
    pub persons: Vec<String>,
    pub corpus: Corpus,
}

fn first_seen<'a>(values: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = BTreeSet::new();
    values.filter(|v| seen.insert(*v)).collect()
}

fn pick(available: Vec<&str>, chosen: &Option<Vec<String>>, n: usize, what: &str) -> Result<Vec<String>> {
    match chosen {
        Some(list) => {
            let missing: Vec<&str> = list
                .iter()
                .map(String::as_str)
                .filter(|v| !available.contains(v))
                .collect();
            if !missing.is_empty() {
                return Err(Error::Coverage(format!("no {what} {}", missing.join(", "))));
            }
            let unique: BTreeSet<&String> = list.iter().collect();
            if unique.len() != list.len() || list.is_empty() {
                return Err(Error::Parameter(format!("{what} list must be non-empty and distinct")));
            }
            Ok(list.clone())
        }
        None if available.len() < n => Err(Error::Coverage(format!(
            "need {n} {what} values, table has {}",
            available.len()
        ))),
        None => Ok(available.into_iter().take(n).map(str::to_string).collect()),
    }
}

const LISTED_GAPS: usize = 20;

/// Draws `count` sublanguages of `n_roots` lexemes each. Tense and person
/// values are fixed across sublanguages; only lexemes with every selected
/// cell are eligible.
pub fn sample_sublanguages(table: &InflectionTable, options: &SampleOptions) -> Result<Vec<Sublanguage>> {
    if options.n_roots == 0 {
        return Err(Error::Parameter("n_roots must be positive".into()));
    }
    let records = table.records();
    let tenses = pick(first_seen(records.iter().map(|r| r.tense.as_str())), &options.tenses, 2, "tense")?;
    let persons = pick(first_seen(records.iter().map(|r| r.person.as_str())), &options.persons, 3, "person")?;

    let mut eligible = Vec::new();
    let mut gaps = Vec::new();
    for lexeme in table.lexemes() {
        let mut complete = true;
        for t in &tenses {
            for p in &persons {
                if table.cell(lexeme, t, p).is_none() {
                    complete = false;
                    gaps.push(format!("{lexeme}/{t}/{p}"));
                }
            }
        }
        if complete {
            eligible.push(lexeme);
        }
    }
    if eligible.len() < options.n_roots {
        let mut msg = format!(
            "{} lexemes cover all {} cells, {} needed",
            eligible.len(),
            tenses.len() * persons.len(),
            options.n_roots
        );
        if !gaps.is_empty() {
            let shown: Vec<&str> = gaps.iter().take(LISTED_GAPS).map(String::as_str).collect();
            let _ = write!(msg, "; missing {}", shown.join(", "));
            if gaps.len() > LISTED_GAPS {
                let _ = write!(msg, " and {} more", gaps.len() - LISTED_GAPS);
            }
        }
        return Err(Error::Coverage(msg));
    }

    let config = AttrValConfig::new(
        vec![options.n_roots, tenses.len(), persons.len()],
        table.alphabet().len().max(2),
        table.max_form_len(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    (0..options.count)
        .map(|_| {
            let mut roots: Vec<String> = eligible
                .choose_multiple(&mut rng, options.n_roots)
                .map(|s| s.to_string())
                .collect();
            roots.sort();
            let mut pairs = Vec::with_capacity(roots.len() * tenses.len() * persons.len());
            for (r, root) in roots.iter().enumerate() {
                for (t, tense) in tenses.iter().enumerate() {
                    for (p, person) in persons.iter().enumerate() {
                        let form = table.cell(root, tense, person).expect("eligible lexeme");
                        pairs.push((
                            Meaning(vec![r as u32, t as u32, p as u32]),
                            Message(form.to_vec()),
                        ));
                    }
                }
            }
            Ok(Sublanguage {
                corpus: Corpus::new(config.clone(), pairs)?
                    .with_metadata("generator", "natural")
                    .with_metadata("seed", options.seed.to_string()),
                roots,
                tenses: tenses.clone(),
                persons: persons.clone(),
            })
        })
        .collect()
}

/// Fraction of sublanguages whose segmented-to-character BoSDis ratio is
/// strictly above 1.
pub fn meaningfulness_rate(sublanguages: &[Sublanguage], segmenter: &Segmenter) -> Result<f64> {
    if sublanguages.is_empty() {
        return Err(Error::Parameter("no sublanguages".into()));
    }
    let flags = sublanguages
        .par_iter()
        .map(|s| {
            let seg = segmenter.segment(&s.corpus)?;
            Ok(bosdis_ratio(&s.corpus, &seg)?.is_meaningful())
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(flags.iter().filter(|&&m| m).count() as f64 / flags.len() as f64)
}
