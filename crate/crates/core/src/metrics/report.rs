use std::fmt::Write as _;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::metrics::articulation::mean_violation_rate;
use crate::metrics::disentanglement::{bosdis, posdis, BosdisRatio, RatioConfidence, Vocabulary};
use crate::metrics::topsim::{pair_tables, TopSimOptions};
use crate::segment::{
    bpe_apply, bpe_train, fit_entropy, has_segment, HasConvention, MergeList, SegmentedCorpus,
    VocabBudget,
};

/// Symbol inventory size for the fixed-budget BPE run.
pub const DEFAULT_BPE_VOCAB: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub tau: f64,
    pub convention: HasConvention,
    pub entropy_window: Option<usize>,
    pub bpe_vocab: usize,
    pub topsim: TopSimOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tau: 0.0,
            convention: HasConvention::Rise,
            entropy_window: None,
            bpe_vocab: DEFAULT_BPE_VOCAB,
            topsim: TopSimOptions::default(),
        }
    }
}

/// Segmentation-level results for one segmenter.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmenterSummary {
    /// `has`, `bpe96`, `bpemax`, ...
    pub name: String,
    pub mean_boundaries: f64,
    pub mean_segments: f64,
    pub vocab_size: usize,
    pub bosdis: f64,
    pub ratio: BosdisRatio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub n_pairs: usize,
    pub topsim: f64,
    pub topsim_degenerate: bool,
    pub bosdis_char: f64,
    pub posdis: f64,
    /// Mean HAS boundary count.
    pub haslen: f64,
    pub segmenters: Vec<SegmenterSummary>,
    /// Mean BPE segments per message at each budget.
    pub bpelen: Vec<(VocabBudget, f64)>,
    pub f_topsim: f64,
    pub f_topsim_delta: f64,
    pub best_fusion_pair: (usize, usize),
    pub articulation_violation_rate: f64,
}

/// Mean HAS boundary count.
pub fn haslen(segmented: &SegmentedCorpus) -> f64 {
    segmented.mean_boundaries()
}

/// Mean BPE segments per message for each budget. One training run to the
/// largest budget serves every point, since smaller budgets keep a prefix of
/// the same merge sequence.
pub fn bpelen(corpus: &Corpus, budgets: &[VocabBudget]) -> Result<Vec<(VocabBudget, f64)>> {
    let base = corpus.config().vocab_size();
    if let Some(VocabBudget::Size(n)) = budgets
        .iter()
        .find(|b| matches!(b, VocabBudget::Size(n) if *n < base))
    {
        return Err(Error::Parameter(format!(
            "vocabulary budget {n} is smaller than the {base} base characters"
        )));
    }
    let largest = if budgets.contains(&VocabBudget::Max) {
        VocabBudget::Max
    } else {
        budgets
            .iter()
            .filter_map(|b| match b {
                VocabBudget::Size(n) => Some(*n),
                VocabBudget::Max => None,
            })
            .max()
            .map_or(VocabBudget::Size(base), VocabBudget::Size)
    };
    let merges = bpe_train(corpus, largest)?;
    budgets
        .iter()
        .map(|&b| {
            let seg = bpe_apply(&merges.truncated(merges.prefix_len(b)), corpus)?;
            Ok((b, seg.mean_segments()))
        })
        .collect()
}

fn summarize(
    name: &str,
    corpus: &Corpus,
    segmented: &SegmentedCorpus,
    bosdis_char: f64,
) -> Result<SegmenterSummary> {
    let b = bosdis(corpus, Vocabulary::Segments(segmented))?;
    Ok(SegmenterSummary {
        name: name.to_string(),
        mean_boundaries: segmented.mean_boundaries(),
        mean_segments: segmented.mean_segments(),
        vocab_size: segmented.symbol_vocab().len(),
        bosdis: b,
        ratio: BosdisRatio::from_parts(b, bosdis_char),
    })
}

/// Every metric with the standard settings: HAS at `tau`, BPE at the fixed
/// budget and at maximum compression, full-pair TopSim and F-TopSim.
pub fn full_report(corpus: &Corpus, options: &ReportOptions) -> Result<MetricReport> {
    corpus.require_pairs("report")?;
    let tables = pair_tables(corpus, &options.topsim)?;
    let plain = tables.plain.correlation(options.topsim.correlation);
    let fused = tables.fused_topsim(options.topsim.correlation)?;
    let bosdis_char = bosdis(corpus, Vocabulary::Characters)?;

    let model = fit_entropy(corpus, options.entropy_window);
    let has = has_segment(corpus, &model, options.tau, options.convention)?;

    let merges = bpe_train(corpus, VocabBudget::Max)?;
    let fixed = VocabBudget::Size(options.bpe_vocab);
    let at_budget = |b: VocabBudget| -> Result<SegmentedCorpus> {
        let prefix: MergeList = merges.truncated(merges.prefix_len(b));
        bpe_apply(&prefix, corpus)
    };
    let bpe_fixed = at_budget(fixed)?;
    let bpe_max = at_budget(VocabBudget::Max)?;

    let segmenters = vec![
        summarize("has", corpus, &has, bosdis_char)?,
        summarize(&format!("bpe{}", options.bpe_vocab), corpus, &bpe_fixed, bosdis_char)?,
        summarize("bpemax", corpus, &bpe_max, bosdis_char)?,
    ];
    Ok(MetricReport {
        n_pairs: corpus.len(),
        topsim: plain.value,
        topsim_degenerate: plain.degenerate,
        bosdis_char,
        posdis: posdis(corpus)?,
        haslen: has.mean_boundaries(),
        bpelen: vec![
            (fixed, bpe_fixed.mean_segments()),
            (VocabBudget::Max, bpe_max.mean_segments()),
        ],
        segmenters,
        f_topsim: fused.f_topsim,
        f_topsim_delta: fused.delta,
        best_fusion_pair: fused.best_pair,
        articulation_violation_rate: mean_violation_rate(corpus.messages().map(|m| &m[..])),
    })
}

fn confidence_code(c: RatioConfidence) -> &'static str {
    match c {
        RatioConfidence::Normal => "0",
        RatioConfidence::Low => "1",
        RatioConfidence::Unstable => "2",
    }
}

impl MetricReport {
    /// `(metric, value)` rows in a fixed order.
    pub fn rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("n_pairs".to_string(), self.n_pairs.to_string()),
            ("topsim".into(), self.topsim.to_string()),
            (
                "topsim_degenerate".into(),
                u8::from(self.topsim_degenerate).to_string(),
            ),
            ("bosdis_char".into(), self.bosdis_char.to_string()),
            ("posdis".into(), self.posdis.to_string()),
            ("haslen".into(), self.haslen.to_string()),
        ];
        for (budget, len) in &self.bpelen {
            rows.push((format!("bpelen{budget}"), len.to_string()));
        }
        for s in &self.segmenters {
            rows.push((format!("bosdis_{}", s.name), s.bosdis.to_string()));
            rows.push((format!("bosdis_ratio_{}", s.name), s.ratio.value.to_string()));
            rows.push((
                format!("bosdis_ratio_{}_confidence", s.name),
                confidence_code(s.ratio.confidence).to_string(),
            ));
            rows.push((format!("symbols_{}", s.name), s.vocab_size.to_string()));
        }
        rows.push(("f_topsim".into(), self.f_topsim.to_string()));
        rows.push(("f_topsim_delta".into(), self.f_topsim_delta.to_string()));
        let (a, b) = self.best_fusion_pair;
        rows.push(("best_fusion_pair".into(), format!("{a},{b}")));
        rows.push((
            "articulation_violation_rate".into(),
            self.articulation_violation_rate.to_string(),
        ));
        rows
    }

    /// Machine-readable `metric\tvalue` lines with a header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tvalue\n");
        for (k, v) in self.rows() {
            let _ = writeln!(out, "{k}\t{v}");
        }
        out
    }

    /// Aligned human-readable table.
    pub fn to_table(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let shown = v
                .parse::<f64>()
                .ok()
                .filter(|_| v.contains('.'))
                .map_or(v.clone(), |x| format!("{x:.4}"));
            let _ = writeln!(out, "{k:<width$}  {shown}");
        }
        out
    }
}
