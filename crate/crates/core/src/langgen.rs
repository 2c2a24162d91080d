//! Seeded generators for artificial compositional languages.
//!
//! Every language assigns each attribute value (or, for the fusion language, each
//! value combination of the fused pair) a symbol over the character vocabulary and
//! then combines the symbols of a meaning with a kind-specific composition rule.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{join, parse_list, AttrValConfig};
use crate::corpus::{enumerate_meanings, Char, Corpus, Meaning, Message};
use crate::error::{Error, Result};

/// Rejection-sampling budget shared by every build step.
pub const RETRY_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LanguageKind {
    /// Symbols concatenated in attribute order.
    PerfectConcat,
    /// Attribute 0 concatenated, the remaining symbols character-interleaved.
    MixedConcat,
    /// Round-robin interleaving of all symbols.
    Nonconcat,
    /// Prefix-free symbols of per-value random length in `1..=max_symbol_len`.
    VariableLength { max_symbol_len: Option<usize> },
    /// One symbol per value combination of `pair`, concatenated with the others.
    Fusion { pair: Option<(usize, usize)> },
    /// Overlapping symbols summed modulo the vocabulary size. `overlap == 0`
    /// means full overlap (every symbol spans the whole message).
    Mutation { overlap: usize },
    /// The function attribute's value selects a permutation of the other
    /// attributes' concatenated symbols.
    Reordering { function_attr: Option<usize> },
    /// A uniformly random full-length message per meaning.
    Random,
}

impl LanguageKind {
    pub fn name(&self) -> &'static str {
        match self {
            LanguageKind::PerfectConcat => "perfect_concat",
            LanguageKind::MixedConcat => "mixed_concat",
            LanguageKind::Nonconcat => "nonconcat",
            LanguageKind::VariableLength { .. } => "variable_length",
            LanguageKind::Fusion { .. } => "fusion",
            LanguageKind::Mutation { .. } => "mutation",
            LanguageKind::Reordering { .. } => "reordering",
            LanguageKind::Random => "random",
        }
    }

    fn is_layout(&self) -> bool {
        matches!(
            self,
            LanguageKind::PerfectConcat
                | LanguageKind::MixedConcat
                | LanguageKind::Nonconcat
                | LanguageKind::Fusion { .. }
        )
    }
}

/// Kind plus the optional layout overrides accepted by the CLI spec strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindSpec {
    pub kind: LanguageKind,
    /// Position → unit assignment for the layout kinds.
    pub schedule: Option<Vec<usize>>,
    /// Per-unit symbol lengths for the layout kinds.
    pub lengths: Option<Vec<usize>>,
}

impl From<LanguageKind> for KindSpec {
    fn from(kind: LanguageKind) -> Self {
        KindSpec {
            kind,
            schedule: None,
            lengths: None,
        }
    }
}

impl FromStr for KindSpec {
    type Err = Error;

    /// Parses `kind[:key=value]*`, e.g. `fusion:pair=1,2` or `mutation:k=3`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let mut params = HashMap::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("expected key=value, got `{p}`")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| params.remove(key);
        let usize_param = |v: Option<String>, key: &str| -> Result<Option<usize>> {
            v.map(|v| {
                v.parse()
                    .map_err(|_| Error::Spec(format!("invalid {key} `{v}`")))
            })
            .transpose()
        };
        let list_param = |v: Option<String>, key: &str| -> Result<Option<Vec<usize>>> {
            v.map(|v| parse_list(&v).ok_or_else(|| Error::Spec(format!("invalid {key} `{v}`"))))
                .transpose()
        };
        let kind = match name {
            "perfect_concat" => LanguageKind::PerfectConcat,
            "mixed_concat" => LanguageKind::MixedConcat,
            "nonconcat" => LanguageKind::Nonconcat,
            "variable_length" => LanguageKind::VariableLength {
                max_symbol_len: usize_param(take("max"), "max")?,
            },
            "fusion" => {
                let pair = match list_param(take("pair"), "pair")? {
                    None => None,
                    Some(v) if v.len() == 2 => Some((v[0], v[1])),
                    Some(_) => return Err(Error::Spec("pair needs two attribute indices".into())),
                };
                LanguageKind::Fusion { pair }
            }
            "mutation" => LanguageKind::Mutation {
                overlap: usize_param(take("k"), "k")?.unwrap_or(0),
            },
            "reordering" => LanguageKind::Reordering {
                function_attr: usize_param(take("fn"), "fn")?,
            },
            "random" => LanguageKind::Random,
            other => return Err(Error::Spec(format!("unknown language kind `{other}`"))),
        };
        let schedule = list_param(take("schedule"), "schedule")?;
        let lengths = list_param(take("lengths"), "lengths")?;
        if (schedule.is_some() || lengths.is_some()) && !kind.is_layout() {
            return Err(Error::Spec(format!(
                "schedule/lengths do not apply to {}",
                kind.name()
            )));
        }
        if let Some(k) = params.keys().next() {
            return Err(Error::Spec(format!("unknown parameter `{k}` for {name}")));
        }
        Ok(KindSpec {
            kind,
            schedule,
            lengths,
        })
    }
}

impl fmt::Display for KindSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        match &self.kind {
            LanguageKind::VariableLength {
                max_symbol_len: Some(m),
            } => write!(f, ":max={m}")?,
            LanguageKind::Fusion { pair: Some((a, b)) } => write!(f, ":pair={a},{b}")?,
            LanguageKind::Mutation { overlap } => write!(f, ":k={overlap}")?,
            LanguageKind::Reordering {
                function_attr: Some(a),
            } => write!(f, ":fn={a}")?,
            _ => {}
        }
        if let Some(s) = &self.schedule {
            write!(f, ":schedule={}", join(s))?;
        }
        if let Some(l) = &self.lengths {
            write!(f, ":lengths={}", join(l))?;
        }
        Ok(())
    }
}

/// Everything needed to build a language deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageSpec {
    pub kind: KindSpec,
    pub config: AttrValConfig,
    pub seed: u64,
}

impl LanguageSpec {
    pub fn new(kind: impl Into<KindSpec>, config: AttrValConfig, seed: u64) -> Self {
        LanguageSpec {
            kind: kind.into(),
            config,
            seed,
        }
    }
}

/// A group of attributes sharing one symbol per value combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolUnit {
    pub attrs: Vec<usize>,
    pub symbols: Vec<Vec<Char>>,
}

impl SymbolUnit {
    fn value_index(&self, meaning: &Meaning, cards: &[usize]) -> usize {
        self.attrs
            .iter()
            .fold(0, |acc, &a| acc * cards[a] + meaning[a] as usize)
    }

    fn symbol_for(&self, meaning: &Meaning, cards: &[usize]) -> &[Char] {
        &self.symbols[self.value_index(meaning, cards)]
    }
}

/// Symbols for every unit; most languages have one unit per attribute.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolTable {
    pub units: Vec<SymbolUnit>,
}

impl SymbolTable {
    /// Debug dump as `attr\tvalue\tsymbol`; fused units list their attributes
    /// joined by `+` and their values by `,`.
    pub fn to_tsv(&self, cards: &[usize]) -> String {
        let mut out = String::from("attr\tvalue\tsymbol\n");
        for unit in &self.units {
            let attr = unit
                .attrs
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("+");
            for (idx, sym) in unit.symbols.iter().enumerate() {
                let mut values = vec![0usize; unit.attrs.len()];
                let mut rest = idx;
                for (slot, &a) in unit.attrs.iter().enumerate().rev() {
                    values[slot] = rest % cards[a];
                    rest /= cards[a];
                }
                let _ = writeln!(out, "{attr}\t{}\t{}", join(&values), join(sym));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Composition {
    /// `schedule[p]` names the unit whose next character fills position `p`.
    Layout { schedule: Vec<usize> },
    Concat,
    Overlay { offsets: Vec<usize>, len: usize },
    Permute { function_attr: usize, perms: Vec<Vec<usize>> },
    Memorized { messages: Vec<Message> },
}

/// A built language: a total, deterministic map from meanings to messages.
#[derive(Debug, Clone)]
pub struct Language {
    spec: LanguageSpec,
    table: SymbolTable,
    composition: Composition,
}

impl Language {
    pub fn spec(&self) -> &LanguageSpec {
        &self.spec
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    /// Position → unit assignment, for the layout kinds.
    pub fn schedule(&self) -> Option<&[usize]> {
        match &self.composition {
            Composition::Layout { schedule } => Some(schedule),
            _ => None,
        }
    }

    /// Start offsets of the overlapping symbols, for the mutation kind.
    pub fn offsets(&self) -> Option<&[usize]> {
        match &self.composition {
            Composition::Overlay { offsets, .. } => Some(offsets),
            _ => None,
        }
    }

    /// Permutation selected by each value of the function attribute.
    pub fn permutations(&self) -> Option<&[Vec<usize>]> {
        match &self.composition {
            Composition::Permute { perms, .. } => Some(perms),
            _ => None,
        }
    }

    pub fn encode(&self, meaning: &Meaning) -> Result<Message> {
        let config = &self.spec.config;
        meaning.conforms_to(config)?;
        let cards = config.cardinalities();
        let units = &self.table.units;
        let message = match &self.composition {
            Composition::Layout { schedule } => {
                let mut cursors = vec![0usize; units.len()];
                schedule
                    .iter()
                    .map(|&u| {
                        let c = units[u].symbol_for(meaning, cards)[cursors[u]];
                        cursors[u] += 1;
                        c
                    })
                    .collect()
            }
            Composition::Concat => units
                .iter()
                .flat_map(|u| u.symbol_for(meaning, cards).iter().copied())
                .collect(),
            Composition::Overlay { offsets, len } => {
                let vocab = config.vocab_size() as Char;
                let mut out = vec![0 as Char; *len];
                for (unit, &off) in units.iter().zip(offsets) {
                    for (i, &c) in unit.symbol_for(meaning, cards).iter().enumerate() {
                        out[off + i] = (out[off + i] + c) % vocab;
                    }
                }
                out
            }
            Composition::Permute {
                function_attr,
                perms,
            } => {
                let body: Vec<Char> = units
                    .iter()
                    .flat_map(|u| u.symbol_for(meaning, cards).iter().copied())
                    .collect();
                let perm = &perms[meaning[*function_attr] as usize];
                perm.iter().map(|&p| body[p]).collect()
            }
            Composition::Memorized { messages } => messages[meaning.index(config)].0.clone(),
        };
        Ok(Message(message))
    }
}

/// Builds the language described by `spec`. Symbols are unique per unit, and every
/// kind except `random` is verified injective over the whole meaning space.
pub fn build_language(spec: &LanguageSpec) -> Result<Language> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut budget = Budget(RETRY_CAP);
    let plan = plan(spec)?;
    if let Plan::Random = plan {
        let language = build_once(spec, &plan, &mut rng, &mut budget)?;
        return Ok(language);
    }
    let meanings = enumerate_meanings(&spec.config)?;
    loop {
        let language = build_once(spec, &plan, &mut rng, &mut budget)?;
        let mut seen = HashSet::with_capacity(meanings.len());
        let mut injective = true;
        for m in &meanings {
            if !seen.insert(language.encode(m)?) {
                injective = false;
                break;
            }
        }
        if injective {
            return Ok(language);
        }
        budget.spend(1, "injective language")?;
    }
}

/// Encodes every meaning of the configuration.
pub fn generate_corpus(spec: &LanguageSpec) -> Result<Corpus> {
    let language = build_language(spec)?;
    corpus_from_language(&language)
}

pub fn corpus_from_language(language: &Language) -> Result<Corpus> {
    let spec = language.spec();
    let pairs = enumerate_meanings(&spec.config)?
        .into_iter()
        .map(|m| {
            let msg = language.encode(&m)?;
            Ok((m, msg))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus::new(spec.config.clone(), pairs)?
        .with_metadata("generator", spec.kind.to_string())
        .with_metadata("seed", spec.seed.to_string()))
}

struct Budget(u64);

impl Budget {
    fn spend(&mut self, n: u64, what: &str) -> Result<()> {
        if self.0 < n {
            return Err(Error::Capacity(format!(
                "rejection sampling for {what} exceeded {RETRY_CAP} retries"
            )));
        }
        self.0 -= n;
        Ok(())
    }
}

/// Kind parameters resolved against the configuration.
enum Plan {
    Layout {
        units: Vec<Vec<usize>>,
        lengths: Vec<usize>,
        schedule: Vec<usize>,
    },
    Variable {
        max_symbol_len: usize,
    },
    Overlay {
        symbol_len: usize,
        offsets: Vec<usize>,
    },
    Permute {
        function_attr: usize,
        lengths: Vec<usize>,
    },
    Random,
}

/// Splits `total` positions over `n` slots as evenly as possible, earlier slots first.
fn even_split(total: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|i| total / n + usize::from(i < total % n))
        .collect()
}

fn block_schedule(lengths: &[usize]) -> Vec<usize> {
    lengths
        .iter()
        .enumerate()
        .flat_map(|(u, &l)| std::iter::repeat_n(u, l))
        .collect()
}

/// Round-robin over `units`, skipping units whose characters are exhausted.
fn round_robin(units: &[usize], lengths: &[usize]) -> Vec<usize> {
    let mut left: Vec<usize> = units.iter().map(|&u| lengths[u]).collect();
    let mut out = Vec::new();
    while left.iter().any(|&l| l > 0) {
        for (slot, &u) in units.iter().enumerate() {
            if left[slot] > 0 {
                out.push(u);
                left[slot] -= 1;
            }
        }
    }
    out
}

fn plan(spec: &LanguageSpec) -> Result<Plan> {
    let config = &spec.config;
    let n = config.n_attributes();
    let m = config.max_len();
    let shares = even_split(m, n);
    let kind = &spec.kind;
    let plan = match &kind.kind {
        LanguageKind::PerfectConcat | LanguageKind::MixedConcat | LanguageKind::Nonconcat => {
            let units: Vec<Vec<usize>> = (0..n).map(|a| vec![a]).collect();
            let lengths = kind.lengths.clone().unwrap_or(shares);
            let all: Vec<usize> = (0..n).collect();
            let schedule = kind.schedule.clone().unwrap_or_else(|| match kind.kind {
                LanguageKind::PerfectConcat => block_schedule(&lengths),
                LanguageKind::MixedConcat => {
                    let mut s = vec![0; lengths[0]];
                    s.extend(round_robin(&all[1..], &lengths));
                    s
                }
                _ => round_robin(&all, &lengths),
            });
            Plan::Layout {
                units,
                lengths,
                schedule,
            }
        }
        LanguageKind::Fusion { pair } => {
            if n < 2 {
                return Err(Error::Spec("fusion needs at least two attributes".into()));
            }
            let (a, b) = match pair {
                Some(p) => *p,
                None => lowest_cardinality_pair(config.cardinalities()),
            };
            let (a, b) = (a.min(b), a.max(b));
            if a == b || b >= n {
                return Err(Error::Spec(format!("invalid fusion pair ({a},{b})")));
            }
            let mut units = Vec::new();
            let mut default_lengths = Vec::new();
            for attr in 0..n {
                if attr == b {
                    continue;
                }
                if attr == a {
                    units.push(vec![a, b]);
                    default_lengths.push(shares[a] + shares[b]);
                } else {
                    units.push(vec![attr]);
                    default_lengths.push(shares[attr]);
                }
            }
            let lengths = kind.lengths.clone().unwrap_or(default_lengths);
            let schedule = kind
                .schedule
                .clone()
                .unwrap_or_else(|| block_schedule(&lengths));
            Plan::Layout {
                units,
                lengths,
                schedule,
            }
        }
        LanguageKind::VariableLength { max_symbol_len } => {
            let max_symbol_len = max_symbol_len.unwrap_or_else(|| (m / n).min(4));
            if max_symbol_len == 0 || max_symbol_len * n > m {
                return Err(Error::Spec(format!(
                    "max symbol length {max_symbol_len} cannot fit {n} attributes in {m} characters"
                )));
            }
            Plan::Variable { max_symbol_len }
        }
        LanguageKind::Mutation { overlap } => {
            let overlap = if *overlap == 0 { m } else { *overlap };
            let span = m + (n - 1) * overlap;
            if !span.is_multiple_of(n) {
                return Err(Error::Spec(format!(
                    "overlap {overlap} does not tile {m} positions with {n} equal symbols"
                )));
            }
            let symbol_len = span / n;
            if overlap > symbol_len {
                return Err(Error::Spec(format!(
                    "overlap {overlap} exceeds symbol length {symbol_len}"
                )));
            }
            let stride = symbol_len - overlap;
            Plan::Overlay {
                symbol_len,
                offsets: (0..n).map(|i| i * stride).collect(),
            }
        }
        LanguageKind::Reordering { function_attr } => {
            if n < 2 {
                return Err(Error::Spec("reordering needs at least two attributes".into()));
            }
            let f = function_attr.unwrap_or(n - 1);
            if f >= n {
                return Err(Error::Spec(format!("function attribute {f} out of range")));
            }
            Plan::Permute {
                function_attr: f,
                lengths: even_split(m, n - 1),
            }
        }
        LanguageKind::Random => Plan::Random,
    };
    if let Plan::Layout {
        units,
        lengths,
        schedule,
    } = &plan
    {
        if lengths.len() != units.len() {
            return Err(Error::Spec(format!(
                "{} symbol lengths given for {} units",
                lengths.len(),
                units.len()
            )));
        }
        if schedule.len() > m {
            return Err(Error::Spec(format!(
                "schedule of {} positions exceeds max_len {m}",
                schedule.len()
            )));
        }
        for (u, &l) in lengths.iter().enumerate() {
            let used = schedule.iter().filter(|&&s| s == u).count();
            if l == 0 || used != l {
                return Err(Error::Spec(format!(
                    "unit {u} has symbol length {l} but occupies {used} schedule positions"
                )));
            }
        }
        if schedule.iter().any(|&s| s >= units.len()) {
            return Err(Error::Spec("schedule names a unit that does not exist".into()));
        }
    }
    Ok(plan)
}

fn lowest_cardinality_pair(cards: &[usize]) -> (usize, usize) {
    let mut order: Vec<usize> = (0..cards.len()).collect();
    order.sort_by_key(|&i| (cards[i], i));
    (order[0].min(order[1]), order[0].max(order[1]))
}

fn unit_cardinality(attrs: &[usize], cards: &[usize]) -> usize {
    attrs.iter().map(|&a| cards[a]).product()
}

fn build_once(
    spec: &LanguageSpec,
    plan: &Plan,
    rng: &mut ChaCha8Rng,
    budget: &mut Budget,
) -> Result<Language> {
    let config = &spec.config;
    let cards = config.cardinalities();
    let vocab = config.vocab_size();
    let (table, composition) = match plan {
        Plan::Layout {
            units,
            lengths,
            schedule,
        } => {
            let mut table = SymbolTable::default();
            for (attrs, &len) in units.iter().zip(lengths) {
                let count = unit_cardinality(attrs, cards);
                table.units.push(SymbolUnit {
                    attrs: attrs.clone(),
                    symbols: sample_distinct(rng, budget, count, len, vocab)?,
                });
            }
            let schedule = schedule.clone();
            (table, Composition::Layout { schedule })
        }
        Plan::Variable { max_symbol_len } => {
            let mut table = SymbolTable::default();
            for (attr, &card) in cards.iter().enumerate() {
                table.units.push(SymbolUnit {
                    attrs: vec![attr],
                    symbols: sample_prefix_free(rng, budget, card, *max_symbol_len, vocab)?,
                });
            }
            (table, Composition::Concat)
        }
        Plan::Overlay {
            symbol_len,
            offsets,
        } => {
            let mut table = SymbolTable::default();
            for (attr, &card) in cards.iter().enumerate() {
                table.units.push(SymbolUnit {
                    attrs: vec![attr],
                    symbols: sample_distinct(rng, budget, card, *symbol_len, vocab)?,
                });
            }
            let composition = Composition::Overlay {
                offsets: offsets.clone(),
                len: config.max_len(),
            };
            (table, composition)
        }
        Plan::Permute {
            function_attr,
            lengths,
        } => {
            let mut table = SymbolTable::default();
            let content = (0..cards.len()).filter(|a| a != function_attr);
            for (attr, &len) in content.zip(lengths) {
                table.units.push(SymbolUnit {
                    attrs: vec![attr],
                    symbols: sample_distinct(rng, budget, cards[attr], len, vocab)?,
                });
            }
            let total: usize = lengths.iter().sum();
            let perms = sample_permutations(rng, budget, cards[*function_attr], total)?;
            let composition = Composition::Permute {
                function_attr: *function_attr,
                perms,
            };
            (table, composition)
        }
        Plan::Random => {
            let total = enumerate_meanings(config)?.len();
            let messages = (0..total)
                .map(|_| Message(random_string(rng, config.max_len(), vocab)))
                .collect();
            (SymbolTable::default(), Composition::Memorized { messages })
        }
    };
    Ok(Language {
        spec: spec.clone(),
        table,
        composition,
    })
}

fn random_string(rng: &mut ChaCha8Rng, len: usize, vocab: usize) -> Vec<Char> {
    (0..len).map(|_| rng.random_range(0..vocab as Char)).collect()
}

fn capacity(vocab: usize, len: usize) -> u128 {
    (vocab as u128).saturating_pow(len as u32)
}

fn sample_distinct(
    rng: &mut ChaCha8Rng,
    budget: &mut Budget,
    count: usize,
    len: usize,
    vocab: usize,
) -> Result<Vec<Vec<Char>>> {
    if capacity(vocab, len) < count as u128 {
        return Err(Error::Capacity(format!(
            "{count} distinct symbols of length {len} need more than {vocab} characters"
        )));
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = random_string(rng, len, vocab);
        if seen.insert(s.clone()) {
            out.push(s);
        } else {
            budget.spend(1, "distinct symbols")?;
        }
    }
    Ok(out)
}

/// Distinct permutations of `0..len`, one per function value.
fn sample_permutations(
    rng: &mut ChaCha8Rng,
    budget: &mut Budget,
    count: usize,
    len: usize,
) -> Result<Vec<Vec<usize>>> {
    let factorial = (1..=len as u128).fold(1u128, |acc, k| acc.saturating_mul(k));
    if factorial < count as u128 {
        return Err(Error::Capacity(format!(
            "{count} distinct permutations of {len} positions do not exist"
        )));
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut p: Vec<usize> = (0..len).collect();
        p.shuffle(rng);
        if seen.insert(p.clone()) {
            out.push(p);
        } else {
            budget.spend(1, "distinct permutations")?;
        }
    }
    Ok(out)
}

/// A prefix-free code with per-value lengths drawn uniformly from `1..=max_len`.
/// Lengths are redrawn until the Kraft sum admits a prefix-free code.
fn sample_prefix_free(
    rng: &mut ChaCha8Rng,
    budget: &mut Budget,
    count: usize,
    max_len: usize,
    vocab: usize,
) -> Result<Vec<Vec<Char>>> {
    if capacity(vocab, max_len) < count as u128 {
        return Err(Error::Capacity(format!(
            "{count} prefix-free symbols of length <= {max_len} need more than {vocab} characters"
        )));
    }
    let lengths = loop {
        let lengths: Vec<usize> = (0..count).map(|_| rng.random_range(1..=max_len)).collect();
        let kraft: f64 = lengths
            .iter()
            .map(|&l| (vocab as f64).powi(-(l as i32)))
            .sum();
        if kraft <= 1.0 {
            break lengths;
        }
        budget.spend(1, "prefix-free symbol lengths")?;
    };
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&i| (lengths[i], i));
    let mut symbols = vec![Vec::new(); count];
    let mut placed: Vec<Vec<Char>> = Vec::with_capacity(count);
    for i in order {
        loop {
            let s = random_string(rng, lengths[i], vocab);
            if !placed.iter().any(|p| s.starts_with(p)) {
                placed.push(s.clone());
                symbols[i] = s;
                break;
            }
            budget.spend(1, "prefix-free symbols")?;
        }
    }
    Ok(symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Preset;

    fn spec(kind: &str, preset: Preset, seed: u64) -> LanguageSpec {
        LanguageSpec::new(kind.parse::<KindSpec>().unwrap(), preset.config(), seed)
    }

    fn small() -> AttrValConfig {
        AttrValConfig::new(vec![3, 4, 2], 4, 9).unwrap()
    }

    #[test]
    fn perfect_concat_tables() {
        let lang = build_language(&spec("perfect_concat", Preset::Default, 1)).unwrap();
        assert_eq!(lang.table().units.len(), 3);
        for unit in &lang.table().units {
            assert_eq!(unit.symbols.len(), 16);
            assert!(unit.symbols.iter().all(|s| s.len() == 3));
            let distinct: HashSet<_> = unit.symbols.iter().collect();
            assert_eq!(distinct.len(), 16);
        }
        assert_eq!(lang.schedule().unwrap(), &[0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn perfect_concat_concatenates() {
        let lang = build_language(&spec("perfect_concat", Preset::Default, 3)).unwrap();
        let m = Meaning(vec![5, 9, 2]);
        let t = &lang.table().units;
        let expected: Vec<Char> = [&t[0].symbols[5], &t[1].symbols[9], &t[2].symbols[2]]
            .into_iter()
            .flatten()
            .copied()
            .collect();
        assert_eq!(lang.encode(&m).unwrap().0, expected);
    }

    #[test]
    fn default_schedules() {
        let mixed = build_language(&spec("mixed_concat", Preset::Default, 1)).unwrap();
        assert_eq!(mixed.schedule().unwrap(), &[0, 0, 0, 1, 2, 1, 2, 1, 2]);
        let non = build_language(&spec("nonconcat", Preset::Default, 1)).unwrap();
        assert_eq!(non.schedule().unwrap(), &[0, 1, 2, 0, 1, 2, 0, 1, 2]);
    }

    #[test]
    fn fusion_tables() {
        let lang = build_language(&spec("fusion:pair=1,2", Preset::Default, 1)).unwrap();
        let units = &lang.table().units;
        assert_eq!(units.len(), 2);
        assert_eq!((units[0].attrs.clone(), units[0].symbols.len()), (vec![0], 16));
        assert_eq!((units[1].attrs.clone(), units[1].symbols.len()), (vec![1, 2], 256));
        assert!(units[1].symbols.iter().all(|s| s.len() == 6));
    }

    #[test]
    fn fusion_pair_defaults_to_lowest_cardinalities() {
        let lang = build_language(&spec("fusion", Preset::Inflection, 1)).unwrap();
        assert_eq!(lang.table().units[1].attrs, vec![1, 2]);
    }

    #[test]
    fn mutation_full_overlap() {
        let lang = build_language(&spec("mutation:k=0", Preset::Default, 4)).unwrap();
        assert_eq!(lang.offsets().unwrap(), &[0, 0, 0]);
        let t = &lang.table().units;
        assert!(t.iter().all(|u| u.symbols.iter().all(|s| s.len() == 9)));
        let m = Meaning(vec![1, 2, 3]);
        let msg = lang.encode(&m).unwrap();
        for i in 0..9 {
            let sum = t[0].symbols[1][i] + t[1].symbols[2][i] + t[2].symbols[3][i];
            assert_eq!(msg[i], sum % 8);
        }
    }

    #[test]
    fn mutation_three_overlap_geometry() {
        let lang = build_language(&spec("mutation:k=3", Preset::Default, 4)).unwrap();
        assert_eq!(lang.offsets().unwrap(), &[0, 2, 4]);
        assert!(lang.table().units.iter().all(|u| u.symbols[0].len() == 5));
        // full overlap written explicitly equals the k=0 alias
        let a = generate_corpus(&spec("mutation:k=0", Preset::Default, 9)).unwrap();
        let b = generate_corpus(&spec("mutation:k=9", Preset::Default, 9)).unwrap();
        assert_eq!(a.pairs(), b.pairs());
    }

    #[test]
    fn mutation_rejects_bad_overlap() {
        assert!(build_language(&spec("mutation:k=2", Preset::Default, 1)).is_err());
    }

    #[test]
    fn reordering_permutations_are_bijections() {
        let lang = build_language(&spec("reordering", Preset::Default, 2)).unwrap();
        let perms = lang.permutations().unwrap();
        assert_eq!(perms.len(), 16);
        for p in perms {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..9).collect::<Vec<_>>());
        }
        // undoing the permutation recovers the concatenated content symbols
        let m = Meaning(vec![4, 7, 11]);
        let msg = lang.encode(&m).unwrap();
        let perm = &perms[11];
        let mut body = vec![0; 9];
        for (pos, &src) in perm.iter().enumerate() {
            body[src] = msg[pos];
        }
        let t = &lang.table().units;
        let expected: Vec<Char> = t[0].symbols[4].iter().chain(&t[1].symbols[7]).copied().collect();
        assert_eq!(body, expected);
    }

    #[test]
    fn variable_length_is_prefix_free_and_fits() {
        let lang = build_language(&spec("variable_length", Preset::Default, 5)).unwrap();
        for unit in &lang.table().units {
            assert!(unit.symbols.iter().all(|s| (1..=3).contains(&s.len())));
            for (i, a) in unit.symbols.iter().enumerate() {
                for (j, b) in unit.symbols.iter().enumerate() {
                    assert!(i == j || !b.starts_with(a));
                }
            }
        }
        let corpus = generate_corpus(&spec("variable_length", Preset::Default, 5)).unwrap();
        assert!(corpus.messages().all(|m| !m.is_empty() && m.len() <= 9));
    }

    #[test]
    fn random_is_memoized() {
        let lang = build_language(&spec("random", Preset::Default, 8)).unwrap();
        let m = Meaning(vec![3, 3, 3]);
        assert_eq!(lang.encode(&m).unwrap(), lang.encode(&m).unwrap());
        assert_eq!(lang.encode(&m).unwrap().len(), 9);
    }

    #[test]
    fn capacity_error() {
        let cfg = AttrValConfig::new(vec![20, 2], 2, 4).unwrap();
        let err = build_language(&LanguageSpec::new(LanguageKind::PerfectConcat, cfg, 0));
        assert!(matches!(err, Err(Error::Capacity(_))));
    }

    #[test]
    fn deterministic_corpora() {
        for kind in ["perfect_concat", "fusion", "random", "mutation:k=3", "reordering"] {
            let a = generate_corpus(&spec(kind, Preset::Inflection, 42)).unwrap();
            let b = generate_corpus(&spec(kind, Preset::Inflection, 42)).unwrap();
            assert_eq!(a.to_tsv(), b.to_tsv(), "{kind}");
            let c = generate_corpus(&spec(kind, Preset::Inflection, 43)).unwrap();
            assert_ne!(a.to_tsv(), c.to_tsv(), "{kind}");
        }
    }

    #[test]
    fn nonconcat_inflection_lengths() {
        let corpus = generate_corpus(&spec("nonconcat", Preset::Inflection, 1)).unwrap();
        assert_eq!(corpus.len(), 252);
        assert!(corpus.messages().all(|m| m.len() == 9));
    }

    #[test]
    fn injective_on_small_configs() {
        let kinds = [
            "perfect_concat",
            "mixed_concat",
            "nonconcat",
            "variable_length",
            "fusion",
            "mutation:k=0",
            "mutation:k=3",
            "reordering",
        ];
        for kind in kinds {
            for seed in 0..5 {
                let s = LanguageSpec::new(kind.parse::<KindSpec>().unwrap(), small(), seed);
                let corpus = generate_corpus(&s).unwrap();
                let distinct: HashSet<_> = corpus.messages().collect();
                assert_eq!(distinct.len(), corpus.len(), "{kind} seed {seed}");
            }
        }
    }

    #[test]
    fn spec_strings() {
        for s in [
            "perfect_concat",
            "fusion:pair=1,2",
            "mutation:k=3",
            "reordering:fn=0",
            "variable_length:max=2",
            "mixed_concat:schedule=0,0,0,1,2,1,2,1,2",
        ] {
            assert_eq!(s.parse::<KindSpec>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<KindSpec>().is_err());
        assert!("fusion:pair=1".parse::<KindSpec>().is_err());
        assert!("random:k=3".parse::<KindSpec>().is_err());
        assert!("random:schedule=0".parse::<KindSpec>().is_err());
    }

    #[test]
    fn custom_schedule_must_match_lengths() {
        let bad = spec("perfect_concat:schedule=0,0,1,1,2,2,2,2,2", Preset::Default, 1);
        assert!(build_language(&bad).is_err());
        let ok = spec(
            "nonconcat:lengths=3,3,3:schedule=0,1,0,2,1,0,2,1,2",
            Preset::Default,
            1,
        );
        assert!(build_language(&ok).is_ok());
    }

    #[test]
    fn symbol_table_dump() {
        let cfg = AttrValConfig::new(vec![2, 2], 4, 4).unwrap();
        let s = LanguageSpec::new("fusion:pair=0,1".parse::<KindSpec>().unwrap(), cfg, 1);
        let lang = build_language(&s).unwrap();
        let tsv = lang.table().to_tsv(&[2, 2]);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "attr\tvalue\tsymbol");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("0+1\t1,1\t"));
    }
}
