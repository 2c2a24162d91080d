//! Byte-pair encoding over integer characters.
//!
//! Training repeatedly merges the most frequent adjacent symbol pair. Ties go to
//! the lexicographically smallest `(left, right)` pair of symbol contents, and
//! pair counts are kept exact after every merge.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::{join, parse_list};
use crate::corpus::{Char, Corpus};
use crate::error::{Error, Result};
use crate::segment::SegmentedCorpus;

/// Target size of the symbol inventory, base characters included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VocabBudget {
    Size(usize),
    /// Merge until no pair occurs at least twice.
    Max,
}

impl std::fmt::Display for VocabBudget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VocabBudget::Size(n) => write!(f, "{n}"),
            VocabBudget::Max => f.write_str("max"),
        }
    }
}

impl std::str::FromStr for VocabBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("max") {
            return Ok(VocabBudget::Max);
        }
        s.parse()
            .map(VocabBudget::Size)
            .map_err(|_| Error::Parameter(format!("invalid vocabulary budget `{s}`")))
    }
}

/// Ordered merges plus the base alphabet size they were trained over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeList {
    base_vocab: usize,
    merges: Vec<(Vec<Char>, Vec<Char>)>,
}

impl MergeList {
    /// Validates that each merge's operands exist when it is applied.
    pub fn new(base_vocab: usize, merges: Vec<(Vec<Char>, Vec<Char>)>) -> Result<Self> {
        let list = MergeList { base_vocab, merges };
        list.symbol_ids()?;
        Ok(list)
    }

    pub fn base_vocab(&self) -> usize {
        self.base_vocab
    }

    pub fn merges(&self) -> &[(Vec<Char>, Vec<Char>)] {
        &self.merges
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// Number of distinct symbols: base characters plus distinct merge results.
    pub fn inventory_size(&self) -> usize {
        let mut seen: BTreeSet<Vec<Char>> = BTreeSet::new();
        for (l, r) in &self.merges {
            seen.insert([l.as_slice(), r.as_slice()].concat());
        }
        self.base_vocab + seen.len()
    }

    /// Number of leading merges a training run with `budget` keeps: training
    /// stops as soon as the inventory reaches the budget.
    pub fn prefix_len(&self, budget: VocabBudget) -> usize {
        let VocabBudget::Size(n) = budget else {
            return self.merges.len();
        };
        let mut seen: BTreeSet<Vec<Char>> = BTreeSet::new();
        let mut inventory = self.base_vocab;
        for (k, (l, r)) in self.merges.iter().enumerate() {
            if inventory >= n {
                return k;
            }
            if seen.insert([l.as_slice(), r.as_slice()].concat()) {
                inventory += 1;
            }
        }
        self.merges.len()
    }

    /// Keeps only the first `n` merges.
    pub fn truncated(&self, n: usize) -> MergeList {
        MergeList {
            base_vocab: self.base_vocab,
            merges: self.merges[..n.min(self.merges.len())].to_vec(),
        }
    }

    /// Content-to-id table replayed in training order.
    fn symbol_ids(&self) -> Result<SymbolIds> {
        let mut ids = SymbolIds::new(self.base_vocab);
        let mut rules = HashMap::with_capacity(self.merges.len());
        for (rank, (l, r)) in self.merges.iter().enumerate() {
            let (Some(li), Some(ri)) = (ids.get(l), ids.get(r)) else {
                return Err(Error::Parameter(format!(
                    "merge {rank} ({} + {}) uses a symbol that does not exist yet",
                    join(l),
                    join(r)
                )));
            };
            let new = ids.intern([l.as_slice(), r.as_slice()].concat());
            rules.entry((li, ri)).or_insert_with(Vec::new).push((rank, new));
        }
        ids.rules = rules;
        Ok(ids)
    }

    /// One merge per line: `left\tright`, symbols as comma-separated characters.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (l, r) in &self.merges {
            let _ = writeln!(out, "{}\t{}", join(l), join(r));
        }
        out
    }

    pub fn from_tsv(text: &str, base_vocab: usize, origin: &str) -> Result<Self> {
        let mut merges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let parsed = line.split_once('\t').and_then(|(l, r)| {
                let l = parse_list::<Char>(l).filter(|v| !v.is_empty())?;
                let r = parse_list::<Char>(r).filter(|v| !v.is_empty())?;
                Some((l, r))
            });
            merges.push(
                parsed.ok_or_else(|| Error::parse(origin, i + 1, format!("malformed merge `{line}`")))?,
            );
        }
        MergeList::new(base_vocab, merges).map_err(|e| Error::parse(origin, 0, e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>, base_vocab: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv(&text, base_vocab, &path.display().to_string())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

struct SymbolIds {
    contents: Vec<Vec<Char>>,
    by_content: HashMap<Vec<Char>, u32>,
    /// Ranks at which each id pair is merged; a pair can recur when a merge
    /// result coincides with an existing symbol.
    rules: HashMap<(u32, u32), Vec<(usize, u32)>>,
}

impl SymbolIds {
    fn new(base_vocab: usize) -> Self {
        let contents: Vec<Vec<Char>> = (0..base_vocab as Char).map(|c| vec![c]).collect();
        let by_content = contents
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        SymbolIds {
            contents,
            by_content,
            rules: HashMap::new(),
        }
    }

    fn get(&self, content: &[Char]) -> Option<u32> {
        self.by_content.get(content).copied()
    }

    fn intern(&mut self, content: Vec<Char>) -> u32 {
        if let Some(id) = self.get(&content) {
            return id;
        }
        let id = self.contents.len() as u32;
        self.by_content.insert(content.clone(), id);
        self.contents.push(content);
        id
    }
}

fn to_ids(corpus: &Corpus, base_vocab: usize) -> Result<Vec<Vec<u32>>> {
    corpus
        .messages()
        .map(|msg| {
            msg.iter()
                .map(|&c| {
                    if (c as usize) < base_vocab {
                        Ok(c)
                    } else {
                        Err(Error::Parameter(format!(
                            "character {c} outside the base vocabulary 0..{base_vocab}"
                        )))
                    }
                })
                .collect()
        })
        .collect()
}

/// Cut indices implied by a tokenization of one message.
fn cuts_of(tokens: &[u32], ids: &SymbolIds) -> Vec<usize> {
    let mut cuts = Vec::with_capacity(tokens.len().saturating_sub(1));
    let mut pos = 0;
    for &t in &tokens[..tokens.len().saturating_sub(1)] {
        pos += ids.contents[t as usize].len();
        cuts.push(pos);
    }
    cuts
}

/// Replaces every left-to-right non-overlapping occurrence of `pair` by `new`.
fn merge_in_place(tokens: &mut Vec<u32>, pair: (u32, u32), new: u32) {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if i + 1 < tokens.len() && (tokens[i], tokens[i + 1]) == pair {
            out.push(new);
            i += 2;
        } else {
            out.push(tokens[i]);
            i += 1;
        }
    }
    *tokens = out;
}

#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: Vec<Char>,
    right: Vec<Char>,
    pair: (u32, u32),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Learns merges until the inventory reaches the budget or no pair occurs twice.
pub fn bpe_train(corpus: &Corpus, budget: VocabBudget) -> Result<MergeList> {
    let base_vocab = corpus.config().vocab_size();
    if let VocabBudget::Size(n) = budget {
        if n < base_vocab {
            return Err(Error::Parameter(format!(
                "vocabulary budget {n} is smaller than the {base_vocab} base characters"
            )));
        }
    }
    let mut ids = SymbolIds::new(base_vocab);
    let mut words = to_ids(corpus, base_vocab)?;
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut where_: HashMap<(u32, u32), BTreeSet<usize>> = HashMap::new();
    for (w, tokens) in words.iter().enumerate() {
        for p in tokens.windows(2) {
            let pair = (p[0], p[1]);
            *counts.entry(pair).or_default() += 1;
            where_.entry(pair).or_default().insert(w);
        }
    }
    let candidate = |pair: (u32, u32), count: u64, ids: &SymbolIds| Candidate {
        count,
        left: ids.contents[pair.0 as usize].clone(),
        right: ids.contents[pair.1 as usize].clone(),
        pair,
    };
    let mut heap: BinaryHeap<Candidate> = counts
        .iter()
        .map(|(&pair, &count)| candidate(pair, count, &ids))
        .collect();

    let mut merges = Vec::new();
    let mut inventory = base_vocab;
    loop {
        if let VocabBudget::Size(n) = budget {
            if inventory >= n {
                break;
            }
        }
        // discard stale heap entries
        let best = loop {
            match heap.pop() {
                None => break None,
                Some(c) if counts.get(&c.pair).copied() == Some(c.count) => break Some(c),
                Some(_) => {}
            }
        };
        let Some(best) = best else { break };
        if best.count < 2 {
            break;
        }
        let before = ids.contents.len();
        let new = ids.intern([best.left.as_slice(), best.right.as_slice()].concat());
        if ids.contents.len() > before {
            inventory += 1;
        }
        let affected = where_.remove(&best.pair).unwrap_or_default();
        let mut touched = BTreeSet::new();
        for w in affected {
            let tokens = &mut words[w];
            for p in tokens.windows(2) {
                let pair = (p[0], p[1]);
                let c = counts.get_mut(&pair).expect("counted pair");
                *c -= 1;
                touched.insert(pair);
            }
            merge_in_place(tokens, best.pair, new);
            for p in tokens.windows(2) {
                let pair = (p[0], p[1]);
                *counts.entry(pair).or_default() += 1;
                where_.entry(pair).or_default().insert(w);
                touched.insert(pair);
            }
        }
        for pair in touched {
            let count = counts[&pair];
            if count == 0 {
                counts.remove(&pair);
                where_.remove(&pair);
            } else {
                heap.push(candidate(pair, count, &ids));
            }
        }
        merges.push((best.left, best.right));
    }
    Ok(MergeList { base_vocab, merges })
}

/// Replays the merges in training order on every message.
pub fn bpe_apply(merges: &MergeList, corpus: &Corpus) -> Result<SegmentedCorpus> {
    let ids = merges.symbol_ids()?;
    let words = to_ids(corpus, merges.base_vocab)?;
    let boundaries = words
        .into_iter()
        .map(|mut tokens| {
            // Merges of a rank below the current one have already had their turn.
            let mut next_rank = 0usize;
            loop {
                let best = tokens
                    .windows(2)
                    .filter_map(|p| {
                        let rules = ids.rules.get(&(p[0], p[1]))?;
                        let r = rules.iter().find(|(rank, _)| *rank >= next_rank)?;
                        Some(((p[0], p[1]), *r))
                    })
                    .min_by_key(|(_, (rank, _))| *rank);
                let Some((pair, (rank, new))) = best else { break };
                merge_in_place(&mut tokens, pair, new);
                next_rank = rank + 1;
            }
            cuts_of(&tokens, &ids)
        })
        .collect();
    SegmentedCorpus::new(corpus.clone(), boundaries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AttrValConfig;
    use crate::corpus::{Meaning, Message};

    fn corpus(msgs: &[&[Char]], vocab: usize) -> Corpus {
        let max_len = msgs.iter().map(|m| m.len()).max().unwrap();
        let cfg = AttrValConfig::new(vec![msgs.len()], vocab, max_len).unwrap();
        let pairs = msgs
            .iter()
            .enumerate()
            .map(|(i, m)| (Meaning(vec![i as u32]), Message(m.to_vec())))
            .collect();
        Corpus::new(cfg, pairs).unwrap()
    }

    #[test]
    fn first_merge_is_most_frequent_pair() {
        let c = corpus(&[&[0, 1, 0, 1], &[0, 1, 0, 1]], 2);
        let m = bpe_train(&c, VocabBudget::Size(3)).unwrap();
        assert_eq!(m.merges(), &[(vec![0], vec![1])]);
        let seg = bpe_apply(&m, &c).unwrap();
        assert_eq!(seg.segments(0), vec![&[0, 1][..], &[0, 1][..]]);
    }

    #[test]
    fn no_budget_no_merges() {
        let c = corpus(&[&[0, 1, 0, 1], &[1, 1, 0]], 2);
        let m = bpe_train(&c, VocabBudget::Size(2)).unwrap();
        assert!(m.is_empty());
        let seg = bpe_apply(&m, &c).unwrap();
        assert_eq!(seg.mean_segments(), c.mean_message_len());
        assert!(bpe_train(&c, VocabBudget::Size(1)).is_err());
    }

    #[test]
    fn ties_break_lexicographically() {
        // (0,1) and (2,3) both occur twice
        let c = corpus(&[&[2, 3, 0, 1], &[0, 1, 2, 3]], 4);
        let m = bpe_train(&c, VocabBudget::Size(5)).unwrap();
        assert_eq!(m.merges()[0], (vec![0], vec![1]));
    }

    #[test]
    fn max_stops_when_pairs_are_unique() {
        let c = corpus(&[&[0, 1, 2], &[0, 1, 3]], 4);
        let m = bpe_train(&c, VocabBudget::Max).unwrap();
        assert_eq!(m.merges(), &[(vec![0], vec![1])]);
    }

    #[test]
    fn overlapping_runs() {
        let c = corpus(&[&[0, 0, 0], &[0, 0, 0, 0]], 2);
        let m = bpe_train(&c, VocabBudget::Size(3)).unwrap();
        let seg = bpe_apply(&m, &c).unwrap();
        assert_eq!(seg.segments(0), vec![&[0, 0][..], &[0][..]]);
        assert_eq!(seg.segments(1), vec![&[0, 0][..], &[0, 0][..]]);
    }

    #[test]
    fn apply_rejects_foreign_characters() {
        let c = corpus(&[&[0, 1], &[1, 0]], 2);
        let m = bpe_train(&c, VocabBudget::Max).unwrap();
        let other = corpus(&[&[0, 2], &[2, 0]], 3);
        assert!(bpe_apply(&m, &other).is_err());
    }

    #[test]
    fn merge_list_validation_and_dump() {
        assert!(MergeList::new(2, vec![(vec![0, 1], vec![1])]).is_err());
        let m = MergeList::new(2, vec![(vec![0], vec![1]), (vec![0, 1], vec![1])]).unwrap();
        assert_eq!(m.to_tsv(), "0\t1\n0,1\t1\n");
        assert_eq!(MergeList::from_tsv(&m.to_tsv(), 2, "t").unwrap(), m);
        assert_eq!(m.inventory_size(), 4);
        assert!(MergeList::from_tsv("0\n", 2, "t").is_err());
    }

    #[test]
    fn budget_parsing() {
        assert_eq!("MAX".parse::<VocabBudget>().unwrap(), VocabBudget::Max);
        assert_eq!("96".parse::<VocabBudget>().unwrap(), VocabBudget::Size(96));
        assert!("x".parse::<VocabBudget>().is_err());
    }
}
