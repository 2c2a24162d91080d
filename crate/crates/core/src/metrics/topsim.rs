//! Topographic similarity and its fused-attribute variant.
//!
//! Both message (Levenshtein) and meaning (Hamming) distances are small integers,
//! so every pair is accumulated into an integer contingency table and the rank
//! correlation is computed exactly from the table. Accumulation order therefore
//! never changes the result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{Char, Corpus};
use crate::error::{Error, Result};
use crate::metrics::distance::levenshtein;

/// Corpora up to this many meanings use every pair by default.
pub const FULL_PAIRS_LIMIT: usize = 4096;
/// Pairs sampled by default above [`FULL_PAIRS_LIMIT`].
pub const DEFAULT_SAMPLED_PAIRS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationKind {
    #[default]
    Spearman,
    Pearson,
}

impl std::str::FromStr for CorrelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spearman" => Ok(CorrelationKind::Spearman),
            "pearson" => Ok(CorrelationKind::Pearson),
            other => Err(Error::Parameter(format!("unknown correlation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairBudget {
    All,
    /// Sample this many unordered pairs (with replacement) unless it covers all pairs.
    Sample(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopSimOptions {
    pub correlation: CorrelationKind,
    /// `None` picks all pairs up to [`FULL_PAIRS_LIMIT`] meanings, else a sample.
    pub pair_budget: Option<PairBudget>,
    pub seed: u64,
}

impl Default for TopSimOptions {
    fn default() -> Self {
        TopSimOptions {
            correlation: CorrelationKind::Spearman,
            pair_budget: None,
            seed: 0,
        }
    }
}

/// A correlation with a flag for zero variance in either variable (value 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub degenerate: bool,
}

/// Joint counts of (message distance, meaning distance).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    cols: usize,
    counts: Vec<u64>,
}

impl DistanceTable {
    fn new(rows: usize, cols: usize) -> Self {
        DistanceTable {
            cols,
            counts: vec![0; rows * cols],
        }
    }

    fn add(&mut self, other: &DistanceTable) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn marginals(&self) -> (Vec<u64>, Vec<u64>) {
        let rows = self.counts.len() / self.cols;
        let mut rx = vec![0u64; rows];
        let mut cy = vec![0u64; self.cols];
        for r in 0..rows {
            for c in 0..self.cols {
                let n = self.counts[r * self.cols + c];
                rx[r] += n;
                cy[c] += n;
            }
        }
        (rx, cy)
    }

    /// Rank (tie-averaged) or raw-value correlation of the two distances.
    pub fn correlation(&self, kind: CorrelationKind) -> Correlation {
        let n = self.total();
        if n == 0 {
            return Correlation {
                value: 0.0,
                degenerate: true,
            };
        }
        let (mx, my) = self.marginals();
        let scores = |marg: &[u64]| -> Vec<f64> {
            match kind {
                CorrelationKind::Pearson => (0..marg.len()).map(|v| v as f64).collect(),
                CorrelationKind::Spearman => {
                    let mut below = 0u64;
                    marg.iter()
                        .map(|&c| {
                            let r = below as f64 + (c as f64 + 1.0) / 2.0;
                            below += c;
                            r
                        })
                        .collect()
                }
            }
        };
        let (sx, sy) = (scores(&mx), scores(&my));
        let nf = n as f64;
        let mean = |s: &[f64], m: &[u64]| -> f64 {
            s.iter().zip(m).map(|(v, &c)| v * c as f64).sum::<f64>() / nf
        };
        let (ax, ay) = (mean(&sx, &mx), mean(&sy, &my));
        let var = |s: &[f64], m: &[u64], a: f64| -> f64 {
            s.iter().zip(m).map(|(v, &c)| (v - a) * (v - a) * c as f64).sum::<f64>()
        };
        let (vx, vy) = (var(&sx, &mx, ax), var(&sy, &my, ay));
        let mut cov = 0.0;
        for (r, &x) in sx.iter().enumerate() {
            for (c, &y) in sy.iter().enumerate() {
                let k = self.counts[r * self.cols + c];
                if k > 0 {
                    cov += (x - ax) * (y - ay) * k as f64;
                }
            }
        }
        if vx <= 0.0 || vy <= 0.0 {
            return Correlation {
                value: 0.0,
                degenerate: true,
            };
        }
        Correlation {
            value: (cov / (vx * vy).sqrt()).clamp(-1.0, 1.0),
            degenerate: false,
        }
    }
}

/// Distance tables for the plain meanings and for every fused attribute pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTables {
    pub plain: DistanceTable,
    /// One table per unordered attribute pair `(i, j)`, `i < j`, in lexicographic order.
    pub fused: Vec<((usize, usize), DistanceTable)>,
    pub n_pairs: u64,
}

fn attribute_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

struct Accumulator<'a> {
    meanings: &'a [&'a [u32]],
    messages: &'a [&'a [Char]],
    fusions: &'a [(usize, usize)],
    rows: usize,
    cols: usize,
}

impl Accumulator<'_> {
    fn empty(&self) -> Vec<DistanceTable> {
        (0..=self.fusions.len())
            .map(|_| DistanceTable::new(self.rows, self.cols))
            .collect()
    }

    fn record(&self, tables: &mut [DistanceTable], i: usize, j: usize) {
        let d_msg = levenshtein(self.messages[i], self.messages[j]);
        let (a, b) = (self.meanings[i], self.meanings[j]);
        let d_mean = a.iter().zip(b).filter(|(x, y)| x != y).count();
        let cols = self.cols;
        tables[0].counts[d_msg * cols + d_mean] += 1;
        for (t, &(p, q)) in tables[1..].iter_mut().zip(self.fusions) {
            let (dp, dq) = (a[p] != b[p], a[q] != b[q]);
            let fused = d_mean - usize::from(dp) - usize::from(dq) + usize::from(dp || dq);
            t.counts[d_msg * cols + fused] += 1;
        }
    }
}

fn merge(mut a: Vec<DistanceTable>, b: Vec<DistanceTable>) -> Vec<DistanceTable> {
    for (x, y) in a.iter_mut().zip(&b) {
        x.add(y);
    }
    a
}

/// Accumulates distance tables over all pairs or a seeded sample of pairs.
pub fn pair_tables(corpus: &Corpus, options: &TopSimOptions) -> Result<PairTables> {
    corpus.require_pairs("TopSim")?;
    let n_attr = corpus.config().n_attributes();
    let meanings: Vec<&[u32]> = corpus.meanings().map(|m| &m[..]).collect();
    let messages: Vec<&[Char]> = corpus.messages().map(|m| &m[..]).collect();
    let fusions = if n_attr >= 2 {
        attribute_pairs(n_attr)
    } else {
        Vec::new()
    };
    let max_len = messages.iter().map(|m| m.len()).max().unwrap_or(0);
    let acc = Accumulator {
        meanings: &meanings,
        messages: &messages,
        fusions: &fusions,
        rows: max_len + 1,
        cols: n_attr + 1,
    };
    let n = corpus.len();
    let all_pairs = (n as u64) * (n as u64 - 1) / 2;
    let budget = options.pair_budget.unwrap_or(if n <= FULL_PAIRS_LIMIT {
        PairBudget::All
    } else {
        PairBudget::Sample(DEFAULT_SAMPLED_PAIRS)
    });
    let (tables, n_pairs) = match budget {
        PairBudget::Sample(k) if k < all_pairs => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            let pairs: Vec<(usize, usize)> = (0..k)
                .map(|_| {
                    let i = rng.random_range(0..n);
                    let mut j = rng.random_range(0..n - 1);
                    if j >= i {
                        j += 1;
                    }
                    (i, j)
                })
                .collect();
            let tables = pairs
                .par_chunks(4096)
                .map(|chunk| {
                    let mut t = acc.empty();
                    for &(i, j) in chunk {
                        acc.record(&mut t, i, j);
                    }
                    t
                })
                .reduce(|| acc.empty(), merge);
            (tables, k)
        }
        _ => {
            let tables = (0..n)
                .into_par_iter()
                .fold(
                    || acc.empty(),
                    |mut t, i| {
                        for j in i + 1..n {
                            acc.record(&mut t, i, j);
                        }
                        t
                    },
                )
                .reduce(|| acc.empty(), merge);
            (tables, all_pairs)
        }
    };
    let mut tables = tables.into_iter();
    let plain = tables.next().expect("plain table");
    Ok(PairTables {
        plain,
        fused: fusions.into_iter().zip(tables).collect(),
        n_pairs,
    })
}

/// Correlation between pairwise Levenshtein and Hamming distances.
pub fn topsim(corpus: &Corpus, options: &TopSimOptions) -> Result<Correlation> {
    Ok(pair_tables(corpus, options)?
        .plain
        .correlation(options.correlation))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedTopSim {
    pub best_pair: (usize, usize),
    pub f_topsim: f64,
    pub topsim: f64,
    /// `f_topsim - topsim`.
    pub delta: f64,
}

impl PairTables {
    /// Maximum TopSim over fused attribute pairs; ties keep the first pair.
    pub fn fused_topsim(&self, kind: CorrelationKind) -> Result<FusedTopSim> {
        let topsim = self.plain.correlation(kind).value;
        let mut best: Option<((usize, usize), f64)> = None;
        for (pair, table) in &self.fused {
            let v = table.correlation(kind).value;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((*pair, v));
            }
        }
        let (best_pair, f_topsim) = best.ok_or_else(|| {
            Error::Metric("F-TopSim needs at least two attributes".into())
        })?;
        Ok(FusedTopSim {
            best_pair,
            f_topsim,
            topsim,
            delta: f_topsim - topsim,
        })
    }

    /// TopSim with attributes `i` and `j` fused into one.
    pub fn fused_pair(&self, pair: (usize, usize), kind: CorrelationKind) -> Option<f64> {
        let pair = (pair.0.min(pair.1), pair.0.max(pair.1));
        self.fused
            .iter()
            .find(|(p, _)| *p == pair)
            .map(|(_, t)| t.correlation(kind).value)
    }
}

/// Best fused pair, its TopSim and the gain over plain TopSim.
pub fn f_topsim(corpus: &Corpus, options: &TopSimOptions) -> Result<FusedTopSim> {
    if corpus.config().n_attributes() < 2 {
        return Err(Error::Metric("F-TopSim needs at least two attributes".into()));
    }
    pair_tables(corpus, options)?.fused_topsim(options.correlation)
}
