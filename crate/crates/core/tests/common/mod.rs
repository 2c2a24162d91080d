//! Brute-force oracles and random corpus builders shared by the integration
//! tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use morphkit::{enumerate_meanings, AttrValConfig, Char, Corpus, Meaning, Message};
use rand::seq::SliceRandom;
use rand::Rng;

/// Plug-in entropy from a histogram, natural log.
pub fn oracle_entropy<T: Ord + Clone>(xs: &[T]) -> f64 {
    let mut hist: BTreeMap<T, usize> = BTreeMap::new();
    for x in xs {
        *hist.entry(x.clone()).or_default() += 1;
    }
    let n = xs.len() as f64;
    -hist
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// I(X;Y) from the full joint histogram.
pub fn oracle_mi<X: Ord + Clone, Y: Ord + Clone>(xs: &[X], ys: &[Y]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mut joint: BTreeMap<(X, Y), usize> = BTreeMap::new();
    let mut px: BTreeMap<X, usize> = BTreeMap::new();
    let mut py: BTreeMap<Y, usize> = BTreeMap::new();
    for (x, y) in xs.iter().zip(ys) {
        *joint.entry((x.clone(), y.clone())).or_default() += 1;
        *px.entry(x.clone()).or_default() += 1;
        *py.entry(y.clone()).or_default() += 1;
    }
    joint
        .iter()
        .map(|((x, y), &c)| {
            let pxy = c as f64 / n;
            let indep = (px[x] as f64 / n) * (py[y] as f64 / n);
            pxy * (pxy / indep).ln()
        })
        .sum()
}

fn gap(attrs: &[Vec<u32>], feature: &[usize]) -> Option<f64> {
    let h = oracle_entropy(feature);
    if h <= 0.0 {
        return None;
    }
    let mut mi: Vec<f64> = attrs.iter().map(|a| oracle_mi(feature, a)).collect();
    mi.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Some((mi[0] - mi[1]) / h)
}

fn columns(corpus: &Corpus) -> Vec<Vec<u32>> {
    (0..corpus.config().n_attributes())
        .map(|a| corpus.meanings().map(|m| m[a]).collect())
        .collect()
}

/// BoSDis over explicit per-message symbol lists.
pub fn oracle_bosdis(corpus: &Corpus, rows: &[Vec<Vec<Char>>]) -> f64 {
    let attrs = columns(corpus);
    let vocab: std::collections::BTreeSet<&Vec<Char>> = rows.iter().flatten().collect();
    let gaps: Vec<f64> = vocab
        .iter()
        .filter_map(|sym| {
            let counts: Vec<usize> = rows
                .iter()
                .map(|r| r.iter().filter(|s| s == sym).count())
                .collect();
            gap(&attrs, &counts)
        })
        .collect();
    if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    }
}

pub fn character_rows(corpus: &Corpus) -> Vec<Vec<Vec<Char>>> {
    corpus
        .messages()
        .map(|m| m.iter().map(|&c| vec![c]).collect())
        .collect()
}

pub fn oracle_posdis(corpus: &Corpus) -> f64 {
    let m = corpus.config().max_len();
    let attrs = columns(corpus);
    let mut total = 0.0;
    for j in 0..m {
        let keep: Vec<usize> = (0..corpus.len())
            .filter(|&i| corpus.pairs()[i].1.len() > j)
            .collect();
        if keep.is_empty() {
            continue;
        }
        let feature: Vec<usize> = keep.iter().map(|&i| corpus.pairs()[i].1[j] as usize).collect();
        let sub: Vec<Vec<u32>> = attrs
            .iter()
            .map(|a| keep.iter().map(|&i| a[i]).collect())
            .collect();
        total += gap(&sub, &feature).unwrap_or(0.0);
    }
    total / m as f64
}

/// Messages chosen by `f` for every meaning of `config`.
pub fn corpus_from(config: AttrValConfig, f: impl Fn(&Meaning) -> Vec<Char>) -> Corpus {
    let pairs = enumerate_meanings(&config)
        .unwrap()
        .into_iter()
        .map(|m| {
            let msg = Message(f(&m));
            (m, msg)
        })
        .collect();
    Corpus::new(config, pairs).unwrap()
}

/// One character per attribute, each position with its own alphabet, so edit
/// distance and Hamming distance coincide.
pub fn identity_corpus(cards: Vec<usize>) -> Corpus {
    let offsets: Vec<usize> = cards
        .iter()
        .scan(0, |acc, &c| {
            let o = *acc;
            *acc += c;
            Some(o)
        })
        .collect();
    let vocab = cards.iter().sum::<usize>().max(2);
    let n = cards.len();
    let config = AttrValConfig::new(cards, vocab, n).unwrap();
    corpus_from(config, |m| {
        m.iter()
            .zip(&offsets)
            .map(|(&v, &o)| v + o as Char)
            .collect()
    })
}

/// A small corpus with random variable-length messages over a random subset
/// of a random meaning space.
pub fn random_corpus(rng: &mut impl Rng) -> Corpus {
    let n_attrs = rng.random_range(2..=3);
    let cards: Vec<usize> = (0..n_attrs).map(|_| rng.random_range(2..=5)).collect();
    let vocab = rng.random_range(2..=6);
    let max_len = rng.random_range(1..=7);
    let config = AttrValConfig::new(cards, vocab, max_len).unwrap();
    let mut meanings = enumerate_meanings(&config).unwrap();
    meanings.shuffle(rng);
    let keep = rng.random_range(2..=meanings.len());
    let pairs = meanings
        .into_iter()
        .take(keep)
        .enumerate()
        .map(|(i, m)| {
            // The first message is non-empty so the symbol vocabulary is too.
            let len = rng.random_range(usize::from(i == 0)..=max_len);
            let msg = (0..len).map(|_| rng.random_range(0..vocab as Char)).collect();
            (m, Message(msg))
        })
        .collect();
    Corpus::new(config, pairs).unwrap()
}
