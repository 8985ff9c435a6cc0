mod common;

use common::*;
use incex::corpus::{Category, Polarity};
use incex::eval::{
    binary_overlap, classification_report, end_to_end, evaluate_tag_file, proportional_overlap,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn overlap_matches_token_counting_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let sentences = rng.gen_range(1..=3);
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for s in 0..sentences {
            let id = format!("s{s}");
            let n = rng.gen_range(1..=12);
            gold.extend(random_phrases(&mut rng, &id, n));
            pred.extend(random_phrases(&mut rng, &id, n));
        }
        for pol in Polarity::ALL {
            let (bp, br, pp, pr) = brute_overlap(&gold, &pred, pol);
            let b = binary_overlap(&gold, &pred, pol);
            let p = proportional_overlap(&gold, &pred, pol);
            assert_eq!((b.precision, b.recall), (bp, br));
            assert_eq!((p.precision, p.recall), (pp, pr));
            assert!(p.precision <= b.precision && p.recall <= b.recall);
        }
    }
}

#[test]
fn worked_overlap_example() {
    let gold = [phrase("s", 2, 5, Polarity::Inclusion, None)];
    let pred = [phrase("s", 3, 7, Polarity::Inclusion, None)];
    let p = proportional_overlap(&gold, &pred, Polarity::Inclusion);
    assert_eq!(p.precision, 0.5);
    assert_eq!(p.recall, 2.0 / 3.0);
    let b = binary_overlap(&gold, &pred, Polarity::Inclusion);
    assert_eq!((b.precision, b.recall, b.f1), (1.0, 1.0, 1.0));
}

#[test]
fn polarity_strict_scoring() {
    let gold = [phrase("s", 0, 3, Polarity::Inclusion, None)];
    let pred = [phrase("s", 0, 3, Polarity::Exclusion, None)];
    for pol in Polarity::ALL {
        let b = binary_overlap(&gold, &pred, pol);
        assert_eq!((b.precision, b.recall), (0.0, 0.0));
    }
}

#[test]
fn identity_and_all_o_prediction_files() {
    let gold = "Too\tB_EXC\ncrowded\tEXC\nbut\tO\nkids\tB_INC\nloved\tINC\nit\tINC\n\nok\tO\n";
    let same = evaluate_tag_file(gold, gold).unwrap();
    for pol in Polarity::ALL {
        let s = same.polarity(pol);
        for m in [s.binary, s.proportional] {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
    }
    let all_o: String = gold
        .lines()
        .map(|l| match l.split_once('\t') {
            Some((w, _)) => format!("{w}\tO\n"),
            None => "\n".to_string(),
        })
        .collect();
    let none = evaluate_tag_file(gold, &all_o).unwrap();
    for pol in Polarity::ALL {
        let s = none.polarity(pol);
        for m in [s.binary, s.proportional] {
            assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        }
    }
}

#[test]
fn classification_matches_naive_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..40);
        let pick = |rng: &mut ChaCha8Rng| Category::ALL[rng.gen_range(0..4)];
        let gold: Vec<Category> = (0..n).map(|_| pick(&mut rng)).collect();
        let pred: Vec<Category> = (0..n).map(|_| pick(&mut rng)).collect();
        let r = classification_report(&gold, &pred).unwrap();
        let mut weighted_recall = 0.0;
        for c in Category::ALL {
            let (p, rc, support) = naive_class_counts(&gold, &pred, c);
            let got = r.total.class(c.as_str()).unwrap();
            assert_eq!((got.precision, got.recall, got.support), (p, rc, support));
            weighted_recall += rc * support as f64;
        }
        let accuracy = gold.iter().zip(&pred).filter(|(g, p)| g == p).count() as f64 / n as f64;
        assert_eq!(r.total.accuracy, accuracy);
        assert!((r.total.weighted.recall - weighted_recall / n as f64).abs() <= 1e-12);
        assert!((r.total.weighted.recall - accuracy).abs() <= 1e-12);
    }
}

#[test]
fn end_to_end_fixture_suite() {
    let cases = e2e_fixtures();
    assert_eq!(cases.len(), 10);
    for case in &cases {
        if let Err(why) = check_e2e_case(case) {
            panic!("{}: {why}", case.name);
        }
    }
}

#[test]
fn end_to_end_hand_trace() {
    let case = &e2e_fixtures()[0];
    let r = end_to_end(&case.gold, &case.pred);
    assert_eq!(r.overall.precision, 0.5);
    assert_eq!(r.overall.recall, 1.0);
    assert_eq!(r.overall.f1, 2.0 / 3.0);
    assert_eq!(r.exclusion, r.overall);
    assert_eq!(r.inclusion.f1, 0.0);
}
