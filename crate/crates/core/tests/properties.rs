mod common;

use std::collections::BTreeSet;

use common::{corpus_from, random_corpus};
use morphkit::metrics::{
    articulation_score, bosdis, f_topsim, pair_tables, posdis, topsim, CorrelationKind, TopSimOptions,
    Vocabulary,
};
use morphkit::segment::{bpe_apply, bpe_train, fit_entropy, has_segment, HasConvention};
use morphkit::{enumerate_meanings, AttrValConfig, Char, Corpus, Meaning, SegmentedCorpus, VocabBudget};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus_for(seed: u64) -> Corpus {
    random_corpus(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn check_segmentation(c: &Corpus, seg: &SegmentedCorpus) {
    let mut occurring = BTreeSet::new();
    for (i, (_, msg)) in c.pairs().iter().enumerate() {
        let parts = seg.segments(i);
        assert_eq!(parts.concat(), msg.0);
        occurring.extend(parts.into_iter().map(<[Char]>::to_vec));
    }
    assert_eq!(seg.symbol_vocab(), &occurring);
}

/// Meanings with attributes `i` and `j` merged into one attribute.
fn fuse(c: &Corpus, i: usize, j: usize) -> Corpus {
    let cards = c.config().cardinalities();
    let mut new_cards: Vec<usize> = vec![cards[i] * cards[j]];
    new_cards.extend((0..cards.len()).filter(|&a| a != i && a != j).map(|a| cards[a]));
    let config = AttrValConfig::new(new_cards, c.config().vocab_size(), c.config().max_len()).unwrap();
    let pairs = c
        .pairs()
        .iter()
        .map(|(m, msg)| {
            let mut v = vec![m[i] * cards[j] as u32 + m[j]];
            v.extend((0..cards.len()).filter(|&a| a != i && a != j).map(|a| m[a]));
            (Meaning(v), msg.clone())
        })
        .collect();
    Corpus::new(config, pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn enumeration_is_mixed_radix(cards in prop::collection::vec(1usize..5, 1..5)) {
        let config = AttrValConfig::new(cards, 2, 1).unwrap();
        let meanings = enumerate_meanings(&config).unwrap();
        prop_assert_eq!(meanings.len() as u128, config.n_meanings());
        for (k, m) in meanings.iter().enumerate() {
            prop_assert_eq!(m.index(&config), k);
        }
    }

    #[test]
    fn corpus_tsv_round_trips(seed in any::<u64>()) {
        let c = corpus_for(seed);
        let text = c.to_tsv();
        let back = Corpus::from_tsv(&text, Some(c.config()), "mem").unwrap();
        prop_assert_eq!(back.pairs(), c.pairs());
        prop_assert_eq!(back.to_tsv(), text);
    }

    #[test]
    fn segmentations_reconstruct_messages(seed in any::<u64>(), tau in -1.0f64..1.0) {
        let c = corpus_for(seed);
        let model = fit_entropy(&c, None);
        for convention in [HasConvention::Rise, HasConvention::Verbatim] {
            check_segmentation(&c, &has_segment(&c, &model, tau, convention).unwrap());
        }
        for budget in [VocabBudget::Size(c.config().vocab_size() + 3), VocabBudget::Max] {
            check_segmentation(&c, &bpe_apply(&bpe_train(&c, budget).unwrap(), &c).unwrap());
        }
    }

    #[test]
    fn has_boundaries_shrink_as_tau_grows(seed in any::<u64>(), a in -1.0f64..2.0, b in -1.0f64..2.0) {
        let c = corpus_for(seed);
        let model = fit_entropy(&c, None);
        let (lo, hi) = (a.min(b), a.max(b));
        let low = has_segment(&c, &model, lo, HasConvention::Rise).unwrap();
        let high = has_segment(&c, &model, hi, HasConvention::Rise).unwrap();
        for (x, y) in low.boundaries().iter().zip(high.boundaries()) {
            prop_assert!(y.len() <= x.len());
            prop_assert!(y.iter().all(|cut| x.contains(cut)));
        }
    }

    #[test]
    fn bpe_segments_shrink_as_budget_grows(seed in any::<u64>()) {
        let c = corpus_for(seed);
        let base = c.config().vocab_size();
        let at = |b: VocabBudget| bpe_apply(&bpe_train(&c, b).unwrap(), &c).unwrap().mean_segments();
        prop_assert_eq!(at(VocabBudget::Size(base)), c.mean_message_len());
        let mut last = f64::INFINITY;
        for n in (base..base + 12).chain([base + 40]) {
            let len = at(VocabBudget::Size(n));
            prop_assert!(len <= last);
            last = len;
        }
        prop_assert!(at(VocabBudget::Max) <= last);
    }

    #[test]
    fn bpe_is_deterministic_across_thread_counts(seed in any::<u64>()) {
        let c = corpus_for(seed);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| bpe_train(&c, VocabBudget::Max).unwrap());
        let b = four.install(|| bpe_train(&c, VocabBudget::Max).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn disentanglement_is_bounded(seed in any::<u64>()) {
        let c = corpus_for(seed);
        let seg = bpe_apply(&bpe_train(&c, VocabBudget::Max).unwrap(), &c).unwrap();
        for v in [
            bosdis(&c, Vocabulary::Characters).unwrap(),
            bosdis(&c, Vocabulary::Segments(&seg)).unwrap(),
            posdis(&c).unwrap(),
        ] {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{}", v);
        }
    }

    #[test]
    fn fused_topsim_matches_explicit_fusion(seed in any::<u64>()) {
        let c = corpus_for(seed);
        prop_assume!(c.config().n_attributes() == 3);
        let opts = TopSimOptions::default();
        let tables = pair_tables(&c, &opts).unwrap();
        let f = f_topsim(&c, &opts).unwrap();
        prop_assert_eq!(f.delta, f.f_topsim - f.topsim);
        let mut best = f64::NEG_INFINITY;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let explicit = topsim(&fuse(&c, i, j), &opts).unwrap().value;
            let tabled = tables.fused_pair((i, j), CorrelationKind::Spearman).unwrap();
            prop_assert!((explicit - tabled).abs() < 1e-12);
            best = best.max(explicit);
        }
        prop_assert!((best - f.f_topsim).abs() < 1e-12);
        let at_best = topsim(&fuse(&c, f.best_pair.0, f.best_pair.1), &opts).unwrap().value;
        prop_assert!((at_best - best).abs() < 1e-12);
    }

    #[test]
    fn sampled_topsim_is_seeded(seed in any::<u64>()) {
        let c = corpus_for(seed);
        let opts = TopSimOptions {
            pair_budget: Some(morphkit::metrics::PairBudget::Sample(50)),
            seed,
            ..Default::default()
        };
        prop_assert_eq!(topsim(&c, &opts).unwrap(), topsim(&c, &opts).unwrap());
    }

    #[test]
    fn articulation_is_additive_up_to_the_junction(
        a in prop::collection::vec(0u32..6, 0..8),
        b in prop::collection::vec(0u32..6, 0..8),
    ) {
        let joined: Vec<Char> = a.iter().chain(&b).copied().collect();
        let junction = match (a.last(), b.first()) {
            (Some(x), Some(y)) if x % 2 == y % 2 => 1,
            _ => 0,
        };
        prop_assert_eq!(
            articulation_score(&joined, 1.0).violations,
            articulation_score(&a, 1.0).violations + articulation_score(&b, 1.0).violations + junction
        );
    }
}

#[test]
fn identity_bosdis_and_posdis_are_one() {
    // 2x2 config, each value its own character.
    let config = AttrValConfig::new(vec![2, 2], 4, 2).unwrap();
    let c = corpus_from(config, |m| vec![m[0], 2 + m[1]]);
    assert!((bosdis(&c, Vocabulary::Characters).unwrap() - 1.0).abs() < 1e-12);
    assert!((posdis(&c).unwrap() - 1.0).abs() < 1e-12);
}
