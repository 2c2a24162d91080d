//! Reference values on the default preset, with the tolerances the metric
//! definitions allow for construction freedom.

mod common;

use common::oracle_posdis;
use morphkit::metrics::{bosdis, compare_means, f_topsim, posdis, TopSimOptions, Vocabulary};
use morphkit::segment::{bpe_apply, bpe_train};
use morphkit::{generate_corpus, AttrValConfig, Corpus, LanguageKind, LanguageSpec, Preset, VocabBudget};

fn default_corpus(kind: LanguageKind, seed: u64) -> Corpus {
    generate_corpus(&LanguageSpec::new(kind, Preset::Default.config(), seed)).unwrap()
}

fn bpelen(c: &Corpus, budget: VocabBudget) -> f64 {
    bpe_apply(&bpe_train(c, budget).unwrap(), c).unwrap().mean_segments()
}

#[test]
fn random_bosdis_is_near_zero_and_fusion_bosdis_is_moderate() {
    let random = bosdis(&default_corpus(LanguageKind::Random, 0), Vocabulary::Characters).unwrap();
    assert!(random < 0.005, "{random}");
    for seed in 0..3 {
        let fusion = default_corpus(LanguageKind::Fusion { pair: None }, seed);
        let b = bosdis(&fusion, Vocabulary::Characters).unwrap();
        assert!((b - 0.126).abs() <= 0.02, "seed {seed}: {b}");
    }
}

#[test]
fn random_posdis_is_small_and_matches_the_oracle() {
    let c = default_corpus(LanguageKind::Random, 1);
    assert!(posdis(&c).unwrap() < 0.05);
    let small = AttrValConfig::new(vec![3, 3, 3], 8, 9).unwrap();
    let sub = generate_corpus(&LanguageSpec::new(LanguageKind::Random, small, 1)).unwrap();
    assert!((posdis(&sub).unwrap() - oracle_posdis(&sub)).abs() < 1e-12);
}

#[test]
fn bpe_lengths_on_default_corpora() {
    let perfect = default_corpus(LanguageKind::PerfectConcat, 2);
    let at96 = bpelen(&perfect, VocabBudget::Size(96));
    assert!((at96 - 3.185).abs() <= 0.3, "{at96}");
    assert!((bpelen(&perfect, VocabBudget::Max) - 2.0).abs() < 0.05);
    let random = bpelen(&default_corpus(LanguageKind::Random, 2), VocabBudget::Max);
    assert!((random - 3.105).abs() < 0.1, "{random}");
}

#[test]
fn fusion_on_a_chosen_pair_is_recovered() {
    let c = default_corpus(LanguageKind::Fusion { pair: Some((1, 2)) }, 3);
    let f = f_topsim(&c, &TopSimOptions::default()).unwrap();
    assert_eq!(f.best_pair, (1, 2));
    assert!((f.delta - 0.175).abs() < 0.05, "{}", f.delta);

    let p = f_topsim(&default_corpus(LanguageKind::PerfectConcat, 3), &TopSimOptions::default()).unwrap();
    assert!((p.delta + 0.236).abs() < 0.05, "{}", p.delta);
}

#[test]
fn jittered_constant_samples_are_significantly_different() {
    let a = [1.0, 1.001, 0.999, 1.0];
    let b = [2.0, 2.001, 1.999, 2.0];
    let w = compare_means(&a, &b).unwrap();
    // Closed form: equal variances s^2, t = (1 - 2) / sqrt(2 s^2 / 4).
    let s2 = (0.001f64.powi(2) * 2.0) / 3.0;
    assert!((w.t - (-1.0 / (s2 / 2.0).sqrt())).abs() < 1e-6 * w.t.abs());
    assert!((w.df - 6.0).abs() < 1e-9);
    assert!(w.p < 0.01);
}
