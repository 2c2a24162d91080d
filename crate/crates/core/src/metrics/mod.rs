//! Compositionality, concatenativity and fusionality metrics.

mod articulation;
mod disentanglement;
mod distance;
mod info;
mod report;
mod stats;
mod topsim;

pub use articulation::{articulation_score, mean_violation_rate, ArticulationScore};
pub use disentanglement::{
    bosdis, bosdis_ratio, posdis, BosdisRatio, RatioConfidence, Vocabulary, LOW_CONFIDENCE_BOSDIS,
};
pub use distance::{levenshtein, meaning_distance};
pub use info::{entropy, mutual_information};
pub use report::{
    bpelen, full_report, haslen, MetricReport, ReportOptions, SegmenterSummary, DEFAULT_BPE_VOCAB,
};
pub use stats::{compare_means, mean_and_sd, WelchTest};
pub use topsim::{
    f_topsim, pair_tables, topsim, Correlation, CorrelationKind, DistanceTable, FusedTopSim,
    PairBudget, PairTables, TopSimOptions, DEFAULT_SAMPLED_PAIRS, FULL_PAIRS_LIMIT,
};
