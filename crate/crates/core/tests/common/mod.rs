//! Independent oracles shared by the integration tests: exhaustive path
//! enumeration, per-token overlap counting, naive classification counts and
//! central finite differences.

#![allow(dead_code)]

use incex::corpus::{BioTag, Category, LabeledSentence, Phrase, Polarity, Sentence};
use incex::features::{token_features, FeatureConfig, FeatureSpec};
use incex::tagger::{CrfModel, Potentials};
use rand::Rng;

pub const K: usize = 5;

/// Everything enumeration over all `5^n` paths can tell about a chain.
pub struct Enumerated {
    pub log_partition: f64,
    pub best_score: f64,
    pub node: Vec<[f64; K]>,
    pub edge: Vec<[[f64; K]; K]>,
}

/// Score of a path, summed left to right as `((b + e0) + T) + e1 ... + end`.
/// Viterbi accumulates in the same order, so maxima agree bit for bit.
pub fn brute_path_score(p: &Potentials, path: &[usize]) -> f64 {
    let mut s = p.begin[path[0]] + p.emissions[0][path[0]];
    for i in 1..path.len() {
        s = s + p.transition[path[i - 1]][path[i]] + p.emissions[i][path[i]];
    }
    s + p.end[path[path.len() - 1]]
}

pub fn all_paths(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..K.pow(n as u32)).map(move |mut code| {
        let mut path = vec![0; n];
        for slot in path.iter_mut().rev() {
            *slot = code % K;
            code /= K;
        }
        path
    })
}

pub fn enumerate(p: &Potentials) -> Enumerated {
    let n = p.emissions.len();
    let paths: Vec<Vec<usize>> = all_paths(n).collect();
    let scores: Vec<f64> = paths.iter().map(|x| brute_path_score(p, x)).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
    let log_partition = max + z.ln();
    let mut node = vec![[0.0; K]; n];
    let mut edge = vec![[[0.0; K]; K]; n.saturating_sub(1)];
    for (path, s) in paths.iter().zip(&scores) {
        let prob = (s - log_partition).exp();
        for i in 0..n {
            node[i][path[i]] += prob;
        }
        for i in 0..n.saturating_sub(1) {
            edge[i][path[i]][path[i + 1]] += prob;
        }
    }
    Enumerated {
        log_partition,
        best_score: max,
        node,
        edge,
    }
}

pub fn random_potentials<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Potentials {
    let mut row = || {
        let mut r = [0.0; K];
        for x in &mut r {
            *x = rng.gen_range(-scale..=scale);
        }
        r
    };
    let emissions = (0..n).map(|_| row()).collect();
    let begin = row();
    let end = row();
    let mut transition = [[0.0; K]; K];
    for r in &mut transition {
        *r = row();
    }
    Potentials {
        emissions,
        transition,
        begin,
        end,
    }
}

pub const VOCAB: [&str; 8] = ["Too", "crowded", "kids", "loved", "it", "$", "25", "ok"];

pub fn random_sentence<R: Rng>(rng: &mut R, id: &str, n: usize) -> Sentence {
    let words: Vec<&str> = (0..n)
        .map(|_| VOCAB[rng.gen_range(0..VOCAB.len())])
        .collect();
    Sentence::new(id, words).unwrap()
}

pub fn random_tags<R: Rng>(rng: &mut R, n: usize) -> Vec<BioTag> {
    (0..n).map(|_| BioTag::ALL[rng.gen_range(0..K)]).collect()
}

/// A CRF whose feature set is exactly what `sentences` produce under `cfg`,
/// with every weight drawn uniformly from `[-scale, scale]`.
pub fn random_model<R: Rng>(
    rng: &mut R,
    sentences: &[&Sentence],
    cfg: &FeatureConfig<'_>,
    scale: f64,
) -> CrfModel {
    let mut names: Vec<String> = Vec::new();
    for s in sentences {
        for i in 0..s.len() {
            for (name, _) in token_features(s, i, cfg).unwrap().iter() {
                if !names.iter().any(|n| n == name) {
                    names.push(name.to_string());
                }
            }
        }
    }
    let mut model = CrfModel::zeros(names, cfg.spec());
    for w in model.weights_mut() {
        *w = rng.gen_range(-scale..=scale);
    }
    model
}

pub fn default_spec() -> FeatureSpec {
    FeatureSpec::default()
}

/// Central finite-difference gradient of `f` at `x`.
pub fn finite_difference<F: FnMut(&[f64]) -> f64>(x: &[f64], h: f64, mut f: F) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            probe[j] = x[j] + h;
            let up = f(&probe);
            probe[j] = x[j] - h;
            let down = f(&probe);
            probe[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Overlap metrics from per-token membership masks:
/// `(binary P, binary R, proportional P, proportional R)`.
pub fn brute_overlap(gold: &[Phrase], pred: &[Phrase], pol: Polarity) -> (f64, f64, f64, f64) {
    let gold: Vec<&Phrase> = gold.iter().filter(|p| p.polarity == pol).collect();
    let pred: Vec<&Phrase> = pred.iter().filter(|p| p.polarity == pol).collect();
    let covered = |token_sentence: &str, t: usize, side: &[&Phrase]| {
        side.iter()
            .any(|q| q.sentence_id == token_sentence && q.start <= t && t < q.end)
    };
    let credit = |p: &Phrase, other: &[&Phrase]| {
        (p.start..p.end)
            .filter(|&t| covered(&p.sentence_id, t, other))
            .count()
    };
    let div = |a: f64, b: usize| if b == 0 { 0.0 } else { a / b as f64 };
    let bin_p = pred.iter().filter(|p| credit(p, &gold) > 0).count();
    let bin_r = gold.iter().filter(|g| credit(g, &pred) > 0).count();
    let mut prop_p = 0.0;
    for p in &pred {
        prop_p += credit(p, &gold) as f64 / (p.end - p.start) as f64;
    }
    let mut prop_r = 0.0;
    for g in &gold {
        prop_r += credit(g, &pred) as f64 / (g.end - g.start) as f64;
    }
    (
        div(bin_p as f64, pred.len()),
        div(bin_r as f64, gold.len()),
        div(prop_p, pred.len()),
        div(prop_r, gold.len()),
    )
}

/// Per-class `(precision, recall, support)` by direct counting.
pub fn naive_class_counts(gold: &[Category], pred: &[Category], c: Category) -> (f64, f64, usize) {
    let tp = gold
        .iter()
        .zip(pred)
        .filter(|(g, p)| **g == c && **p == c)
        .count();
    let predicted = pred.iter().filter(|p| **p == c).count();
    let support = gold.iter().filter(|g| **g == c).count();
    let div = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    (div(tp, predicted), div(tp, support), support)
}

pub fn phrase(id: &str, start: usize, end: usize, pol: Polarity, cat: Option<Category>) -> Phrase {
    Phrase {
        sentence_id: id.to_string(),
        start,
        end,
        polarity: pol,
        category: cat,
        text: String::new(),
    }
}

/// Disjoint random phrases over a sentence of `n` tokens.
pub fn random_phrases<R: Rng>(rng: &mut R, id: &str, n: usize) -> Vec<Phrase> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if rng.gen_bool(0.35) {
            let len = rng.gen_range(1..=(n - i).min(4));
            let pol = if rng.gen_bool(0.5) {
                Polarity::Inclusion
            } else {
                Polarity::Exclusion
            };
            out.push(phrase(id, i, i + len, pol, None));
            i += len;
        } else {
            i += 1;
        }
    }
    out
}

pub fn token_accuracy(gold: &[LabeledSentence], pred: &[LabeledSentence]) -> f64 {
    let mut right = 0;
    let mut total = 0;
    for (g, p) in gold.iter().zip(pred) {
        for (a, b) in g.tags().iter().zip(p.tags()) {
            right += usize::from(a == b);
            total += 1;
        }
    }
    right as f64 / total as f64
}

/// A hand-traced end-to-end scoring case.
pub struct E2eCase {
    pub name: &'static str,
    pub gold: Vec<Phrase>,
    pub pred: Vec<Phrase>,
    /// Gold index each prediction should match (`None` = sink).
    pub matches: Vec<Option<usize>>,
    pub precision: f64,
    pub recall: f64,
    /// Confusion entries in the sink column (unmatched gold phrases).
    pub gold_in_sink: usize,
}

pub fn e2e_fixtures() -> Vec<E2eCase> {
    use Category::*;
    use Polarity::{Exclusion as X, Inclusion as I};
    vec![
        E2eCase {
            name: "one crowd phrase, one of two predictions matches",
            gold: vec![phrase("s1", 2, 5, X, Some(Crowd))],
            pred: vec![
                phrase("s1", 3, 5, X, Some(Crowd)),
                phrase("s1", 7, 9, X, Some(Crowd)),
            ],
            matches: vec![Some(0), None],
            precision: 0.5,
            recall: 1.0,
            gold_in_sink: 0,
        },
        E2eCase {
            name: "exact span, wrong category",
            gold: vec![phrase("s1", 0, 2, X, Some(Crowd))],
            pred: vec![phrase("s1", 0, 2, X, Some(Price))],
            matches: vec![Some(0)],
            precision: 0.0,
            recall: 0.0,
            gold_in_sink: 0,
        },
        E2eCase {
            name: "largest intersection wins",
            gold: vec![
                phrase("s1", 0, 3, I, Some(Price)),
                phrase("s1", 4, 8, I, Some(Crowd)),
            ],
            pred: vec![phrase("s1", 2, 6, I, Some(Crowd))],
            matches: vec![Some(1)],
            precision: 1.0,
            recall: 0.5,
            gold_in_sink: 1,
        },
        E2eCase {
            name: "intersection tie goes to the earlier gold phrase",
            gold: vec![
                phrase("s1", 3, 5, I, Some(Crowd)),
                phrase("s1", 0, 2, I, Some(Price)),
            ],
            pred: vec![phrase("s1", 1, 4, I, Some(Crowd))],
            matches: vec![Some(1)],
            precision: 0.0,
            recall: 0.0,
            gold_in_sink: 1,
        },
        E2eCase {
            name: "polarity must agree for credit",
            gold: vec![phrase("s1", 0, 2, X, Some(Crowd))],
            pred: vec![phrase("s1", 0, 2, I, Some(Crowd))],
            matches: vec![Some(0)],
            precision: 0.0,
            recall: 0.0,
            gold_in_sink: 0,
        },
        E2eCase {
            name: "no predictions",
            gold: vec![phrase("s1", 0, 2, X, Some(Hygiene))],
            pred: vec![],
            matches: vec![],
            precision: 0.0,
            recall: 0.0,
            gold_in_sink: 1,
        },
        E2eCase {
            name: "same span in another sentence goes to the sink",
            gold: vec![phrase("s1", 0, 2, X, Some(Queues))],
            pred: vec![phrase("s2", 0, 2, X, Some(Queues))],
            matches: vec![None],
            precision: 0.0,
            recall: 0.0,
            gold_in_sink: 1,
        },
        E2eCase {
            name: "two correct predictions inside one gold phrase",
            gold: vec![phrase("s1", 0, 6, I, Some(Food))],
            pred: vec![
                phrase("s1", 0, 2, I, Some(Food)),
                phrase("s1", 3, 6, I, Some(Food)),
            ],
            matches: vec![Some(0), Some(0)],
            precision: 1.0,
            recall: 1.0,
            gold_in_sink: 0,
        },
        E2eCase {
            name: "one prediction spanning two gold phrases",
            gold: vec![
                phrase("s1", 0, 2, I, Some(Food)),
                phrase("s1", 2, 4, I, Some(Food)),
            ],
            pred: vec![phrase("s1", 0, 4, I, Some(Food))],
            matches: vec![Some(0)],
            precision: 1.0,
            recall: 0.5,
            gold_in_sink: 1,
        },
        E2eCase {
            name: "mixed polarities, one right and one wrong",
            gold: vec![
                phrase("s1", 0, 2, I, Some(Price)),
                phrase("s1", 3, 5, X, Some(Crowd)),
            ],
            pred: vec![
                phrase("s1", 0, 2, I, Some(Price)),
                phrase("s1", 3, 5, X, Some(Queues)),
            ],
            matches: vec![Some(0), Some(1)],
            precision: 0.5,
            recall: 0.5,
            gold_in_sink: 0,
        },
    ]
}

/// Checks one fixture, returning a description of the first discrepancy.
pub fn check_e2e_case(case: &E2eCase) -> Result<(), String> {
    let r = incex::eval::end_to_end(&case.gold, &case.pred);
    if r.matches != case.matches {
        return Err(format!(
            "matches {:?}, expected {:?}",
            r.matches, case.matches
        ));
    }
    if r.overall.precision != case.precision || r.overall.recall != case.recall {
        return Err(format!(
            "P={} R={}, expected P={} R={}",
            r.overall.precision, r.overall.recall, case.precision, case.recall
        ));
    }
    let sink = incex::eval::SINK_LABEL;
    let gold_in_sink: usize = (0..sink).map(|g| r.classes.confusion[g][sink]).sum();
    if gold_in_sink != case.gold_in_sink {
        return Err(format!(
            "{gold_in_sink} gold phrases in the sink column, expected {}",
            case.gold_in_sink
        ));
    }
    let pred_sink = case.matches.iter().filter(|m| m.is_none()).count();
    let sink_row: usize = r.classes.confusion[sink].iter().sum();
    if sink_row != pred_sink || r.sink_predictions() != pred_sink {
        return Err(format!("sink row holds {sink_row}, expected {pred_sink}"));
    }
    Ok(())
}
