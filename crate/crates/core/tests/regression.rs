//! Hard cases from manual error analysis, kept as a fixed corpus so the
//! scoring rules they exercise do not drift.

mod common;

use common::phrase;
use incex::corpus::{
    filter_sentences, load_lexicon, parse_dataset, tokenize, Category, LabeledSentence, Phrase,
    Polarity,
};
use incex::eval::{end_to_end, evaluate_phrases};

const CORPUS: &str = include_str!("data/error_analysis.tsv");

fn corpus() -> Vec<LabeledSentence> {
    parse_dataset(CORPUS).unwrap()
}

fn by_id<'a>(data: &'a [LabeledSentence], id: &str) -> &'a LabeledSentence {
    data.iter().find(|l| l.sentence.id == id).unwrap()
}

#[test]
fn corpus_loads_with_expected_phrases() {
    let data = corpus();
    assert_eq!(data.len(), 5);
    let handicap = by_id(&data, "showcase-handicap").phrases();
    assert_eq!(handicap.len(), 1);
    assert_eq!(
        handicap[0].text,
        "The wheelchair wouldn't go through the turnstile"
    );
    assert_eq!(handicap[0].category, Some(Category::Handicap));
    assert_eq!(handicap[0].polarity, Polarity::Exclusion);

    // Inside tags with no begin tag still form a phrase.
    let family = by_id(&data, "showcase-family").phrases();
    assert_eq!(family.len(), 1);
    assert_eq!(family[0].text, "twenty five years of togetherness");
    assert_eq!((family[0].start, family[0].end), (7, 12));
    assert_eq!(family[0].category, Some(Category::CouplesFamily));
}

#[test]
fn apostrophes_stay_inside_tokens() {
    let words =
        tokenize("The wheelchair wouldn't go through the turnstile which was disappointing");
    assert_eq!(words.len(), 10);
    assert_eq!(words[2], "wouldn't");
    assert_eq!(
        tokenize("Well worth the $25."),
        ["Well", "worth", "the", "$", "25", "."]
    );
}

#[test]
fn ambiguous_category_costs_category_credit_only() {
    let data = corpus();
    let gold = by_id(&data, "ambiguous-crowd").phrases();
    assert_eq!(gold[0].category, Some(Category::Crowd));
    let mut pred = gold.clone();
    pred[0].category = Some(Category::Claustrophobia);
    let spans = evaluate_phrases(&gold, &pred);
    assert_eq!(spans.exclusion.binary.f1, 1.0);
    let e2e = end_to_end(&gold, &pred);
    assert_eq!(e2e.matches, [Some(0)]);
    assert_eq!(e2e.overall.f1, 0.0);
    let crowd = e2e.classes.class("crowd").unwrap();
    assert_eq!(crowd.support, 1);
    assert_eq!(crowd.recall, 0.0);
}

#[test]
fn conflicting_price_opinions_are_scored_per_polarity() {
    let data = corpus();
    let gold = by_id(&data, "conflicting-price").phrases();
    assert_eq!(gold.len(), 2);
    assert_eq!(gold[0].text, "Well worth the $ 25");
    assert_eq!(gold[0].polarity, Polarity::Inclusion);
    assert_eq!(gold[1].text, "The cost of the day was very expensive");
    assert_eq!(gold[1].polarity, Polarity::Exclusion);
    assert!(gold.iter().all(|p| p.category == Some(Category::Price)));

    // Swapping the two polarities earns nothing under strict scoring.
    let swapped: Vec<Phrase> = gold
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.polarity = match p.polarity {
                Polarity::Inclusion => Polarity::Exclusion,
                Polarity::Exclusion => Polarity::Inclusion,
            };
            q
        })
        .collect();
    let r = evaluate_phrases(&gold, &swapped);
    assert_eq!(r.inclusion.binary.f1, 0.0);
    assert_eq!(r.exclusion.binary.f1, 0.0);
    assert_eq!(end_to_end(&gold, &swapped).overall.f1, 0.0);
}

#[test]
fn unrelated_keyword_reference() {
    let data = corpus();
    let tour = by_id(&data, "unrelated-family");
    assert!(tour.phrases().is_empty());
    let lex = load_lexicon("couples_family\tfamily\ncrowd\tcrowds\n").unwrap();
    let sentences: Vec<_> = data.iter().map(|l| l.sentence.clone()).collect();
    let kept: Vec<&str> = filter_sentences(&sentences, &lex)
        .into_iter()
        .map(|(s, _)| s.id.as_str())
        .collect();
    // The keyword filter is lexical, so the tour-guide mention passes it.
    assert_eq!(kept, ["ambiguous-crowd", "unrelated-family"]);

    // A phrase predicted there has no gold partner: it lands in the sink
    // and lowers precision without touching recall.
    let gold: Vec<Phrase> = data.iter().flat_map(LabeledSentence::phrases).collect();
    let mut pred = gold.clone();
    pred.push(phrase(
        "unrelated-family",
        17,
        19,
        Polarity::Inclusion,
        Some(Category::CouplesFamily),
    ));
    let r = end_to_end(&gold, &pred);
    assert_eq!(r.sink_predictions(), 1);
    assert_eq!(r.overall.recall, 1.0);
    assert_eq!(r.overall.precision, gold.len() as f64 / pred.len() as f64);
}
