mod common;

use std::collections::BTreeSet;

use common::*;
use incex::classifier::{softmax, ClassifierModel};
use incex::corpus::{
    decode_phrases, encode_tags, filter_sentences, parse_dataset, serialize_dataset, BioTag,
    Category, KeywordLexicon, LabeledSentence, Phrase, Polarity, Sentence,
};
use incex::eval::{
    binary_overlap, classification_report, end_to_end, evaluate_phrases, proportional_overlap,
};
use incex::features::{FeatureConfig, FeatureVector};
use incex::tagger::{log_partition, viterbi_with_score, Potentials};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word() -> impl Strategy<Value = String> {
    "[A-Za-z0-9$!.,'-]{1,8}"
}

fn tag() -> impl Strategy<Value = BioTag> {
    (0..5usize).prop_map(|i| BioTag::ALL[i])
}

fn category() -> impl Strategy<Value = Category> {
    (0..11usize).prop_map(|i| Category::ALL[i])
}

fn words_and_tags(max: usize) -> impl Strategy<Value = (Vec<String>, Vec<BioTag>)> {
    (1..=max).prop_flat_map(|n| {
        (
            proptest::collection::vec(word(), n),
            proptest::collection::vec(tag(), n),
        )
    })
}

fn potentials(max: usize) -> impl Strategy<Value = Potentials> {
    let row = || proptest::array::uniform5(-3.0f64..3.0);
    (
        proptest::collection::vec(row(), 1..=max),
        proptest::array::uniform5(row()),
        row(),
        row(),
    )
        .prop_map(|(emissions, transition, begin, end)| Potentials {
            emissions,
            transition,
            begin,
            end,
        })
}

fn phrase_sets() -> impl Strategy<Value = (Vec<Phrase>, Vec<Phrase>)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for (s, n) in [(0, 9), (1, 5)] {
            let id = format!("s{s}");
            gold.extend(random_phrases(&mut rng, &id, n));
            pred.extend(random_phrases(&mut rng, &id, n));
        }
        (gold, pred)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dataset_round_trip(
        blocks in proptest::collection::vec(
            (words_and_tags(8), proptest::collection::vec(proptest::option::of(category()), 8)),
            1..5,
        )
    ) {
        let data: Vec<LabeledSentence> = blocks
            .into_iter()
            .enumerate()
            .map(|(k, ((words, tags), cats))| {
                let n = words.len();
                let cats = tags
                    .iter()
                    .zip(&cats[..n])
                    .map(|(t, c)| if *t == BioTag::O { None } else { *c })
                    .collect();
                let s = Sentence::new(format!("id{k}"), words).unwrap();
                LabeledSentence::with_categories(s, tags, cats).unwrap()
            })
            .collect();
        let text = serialize_dataset(&data);
        prop_assert_eq!(parse_dataset(&text).unwrap(), data);
    }

    #[test]
    fn decoded_phrases_are_sorted_and_disjoint((words, tags) in words_and_tags(12)) {
        let s = Sentence::new("p", words).unwrap();
        let phrases = decode_phrases(&tags, &s).unwrap();
        for w in phrases.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        let covered: usize = phrases.iter().map(Phrase::len).sum();
        let non_o = tags.iter().filter(|t| **t != BioTag::O).count();
        prop_assert_eq!(covered, non_o);
        for p in &phrases {
            prop_assert!(p.start < p.end && p.end <= s.len());
        }
    }

    #[test]
    fn encode_decode_is_idempotent((words, tags) in words_and_tags(12)) {
        let s = Sentence::new("p", words).unwrap();
        let phrases = decode_phrases(&tags, &s).unwrap();
        let canonical = encode_tags(&phrases, s.len()).unwrap();
        prop_assert_eq!(decode_phrases(&canonical, &s).unwrap(), phrases.clone());
        prop_assert_eq!(encode_tags(&decode_phrases(&canonical, &s).unwrap(), s.len()).unwrap(), canonical);
    }

    #[test]
    fn filter_matches_naive_scan(
        sentences in proptest::collection::vec(proptest::collection::vec("[a-cA-C]{1,2}", 1..6), 1..6),
        keywords in proptest::collection::vec((category(), "[a-c]{1,2}"), 0..6),
    ) {
        let mut lex = KeywordLexicon::new();
        for (c, k) in &keywords {
            lex.insert(*c, k);
        }
        let sents: Vec<Sentence> = sentences
            .iter()
            .enumerate()
            .map(|(k, w)| Sentence::new(format!("s{k}"), w.clone()).unwrap())
            .collect();
        let got: Vec<(String, BTreeSet<Category>)> = filter_sentences(&sents, &lex)
            .into_iter()
            .map(|(s, c)| (s.id.clone(), c))
            .collect();
        let mut expected = Vec::new();
        for s in &sents {
            let mut cats = BTreeSet::new();
            for w in s.words() {
                for (c, k) in &keywords {
                    if w.to_lowercase() == *k {
                        cats.insert(*c);
                    }
                }
            }
            if !cats.is_empty() {
                expected.push((s.id.clone(), cats));
            }
        }
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn proportional_never_exceeds_binary((gold, pred) in phrase_sets()) {
        for pol in Polarity::ALL {
            let b = binary_overlap(&gold, &pred, pol);
            let p = proportional_overlap(&gold, &pred, pol);
            prop_assert!(p.precision <= b.precision);
            prop_assert!(p.recall <= b.recall);
            prop_assert!(p.f1 <= b.f1 + 1e-15);
        }
    }

    #[test]
    fn overlap_ignores_phrase_order((gold, pred) in phrase_sets(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g2 = gold.clone();
        let mut p2 = pred.clone();
        g2.shuffle(&mut rng);
        p2.shuffle(&mut rng);
        let a = evaluate_phrases(&gold, &pred);
        let b = evaluate_phrases(&g2, &p2);
        for pol in Polarity::ALL {
            let (x, y) = (a.polarity(pol), b.polarity(pol));
            prop_assert_eq!(x.binary, y.binary);
            prop_assert!((x.proportional.precision - y.proportional.precision).abs() <= 1e-12);
            prop_assert!((x.proportional.recall - y.proportional.recall).abs() <= 1e-12);
        }
    }

    #[test]
    fn partition_dominates_best_path(pot in potentials(8)) {
        let (_, best) = pot.viterbi();
        let z = pot.log_partition();
        prop_assert!(z >= best);
        // A runner-up path differs from the best by one tag, so its score
        // gap is bounded and its share of the sum stays far above rounding.
        prop_assert!(z > best);
    }

    #[test]
    fn constant_emission_shift(pot in potentials(6), i in 0usize..6, c in -5.0f64..5.0) {
        let i = i % pot.emissions.len();
        let mut shifted = pot.clone();
        for x in &mut shifted.emissions[i] {
            *x += c;
        }
        prop_assert!((shifted.log_partition() - pot.log_partition() - c).abs() <= 1e-9);
        prop_assert_eq!(shifted.viterbi().0, pot.viterbi().0);
    }

    #[test]
    fn marginals_are_normalized(pot in potentials(8)) {
        let m = pot.marginals();
        for row in &m.node {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        for (i, table) in m.edge.iter().enumerate() {
            let total: f64 = table.iter().flatten().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            for a in 0..K {
                let out: f64 = table[a].iter().sum();
                prop_assert!((out - m.node[i][a]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn softmax_sums_to_one(scores in proptest::array::uniform11(-50.0f64..50.0)) {
        let p = softmax(&scores);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn prediction_ignores_feature_order(
        entries in proptest::collection::vec(("[a-e]{1,3}", -2.0f64..2.0), 1..8),
        weights in proptest::collection::vec(-1.0f64..1.0, 11 * 6),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let names = ["a", "b", "c", "ab", "bc", "cde"];
        let mut model = ClassifierModel::zeros(names);
        model.weights_mut().copy_from_slice(&weights);
        let mut fv = FeatureVector::new();
        for (n, v) in &entries {
            fv.add(n.clone(), *v);
        }
        let mut shuffled = entries.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut fv2 = FeatureVector::new();
        for (n, v) in &shuffled {
            fv2.add(n.clone(), *v);
        }
        let (c1, s1) = model.predict_features(&fv);
        let (c2, s2) = model.predict_features(&fv2);
        prop_assert_eq!(c1, c2);
        for (x, y) in s1.0.iter().zip(&s2.0) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn weighted_recall_is_accuracy(
        pairs in proptest::collection::vec((category(), category()), 1..60)
    ) {
        let (gold, pred): (Vec<Category>, Vec<Category>) = pairs.into_iter().unzip();
        let r = classification_report(&gold, &pred).unwrap();
        prop_assert!((r.total.weighted.recall - r.total.accuracy).abs() <= 1e-12);
    }

    #[test]
    fn end_to_end_recall_bounded_by_binary(
        (gold, pred) in phrase_sets(),
        cats in proptest::collection::vec(category(), 40),
    ) {
        let label = |v: Vec<Phrase>, off: usize| -> Vec<Phrase> {
            v.into_iter()
                .enumerate()
                .map(|(k, mut p)| {
                    p.category = Some(cats[(k + off) % cats.len()]);
                    p
                })
                .collect()
        };
        let gold = label(gold, 0);
        let pred = label(pred, 7);
        let e2e = end_to_end(&gold, &pred);
        for pol in Polarity::ALL {
            let b = binary_overlap(&gold, &pred, pol);
            let side = match pol {
                Polarity::Inclusion => e2e.inclusion,
                Polarity::Exclusion => e2e.exclusion,
            };
            prop_assert!(side.recall <= b.recall);
            prop_assert!(side.precision <= b.precision);
        }
    }
}

#[test]
fn model_partition_dominates_viterbi_on_real_features() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = FeatureConfig::default();
    for n in 1..=8 {
        let s = random_sentence(&mut rng, "m", n);
        let model = random_model(&mut rng, &[&s], &cfg, 2.0);
        let (_, best) = viterbi_with_score(&model, &s, &cfg);
        assert!(log_partition(&model, &s, &cfg) > best);
    }
}
