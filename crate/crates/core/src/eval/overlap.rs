use std::collections::HashMap;

use super::SpanPrf;
use crate::corpus::{Phrase, Polarity};

fn of_polarity(phrases: &[Phrase], polarity: Polarity) -> Vec<&Phrase> {
    phrases.iter().filter(|p| p.polarity == polarity).collect()
}

/// Disjoint, sorted token intervals covered by the phrases of each sentence.
fn coverage<'a>(phrases: &[&'a Phrase]) -> HashMap<&'a str, Vec<(usize, usize)>> {
    let mut by_sentence: HashMap<&str, Vec<(usize, usize)>> = HashMap::new();
    for p in phrases {
        by_sentence
            .entry(p.sentence_id.as_str())
            .or_default()
            .push((p.start, p.end));
    }
    for spans in by_sentence.values_mut() {
        spans.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(spans.len());
        for &(s, e) in spans.iter() {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        *spans = merged;
    }
    by_sentence
}

fn covered_tokens(p: &Phrase, cover: &HashMap<&str, Vec<(usize, usize)>>) -> usize {
    cover.get(p.sentence_id.as_str()).map_or(0, |spans| {
        spans
            .iter()
            .map(|&(s, e)| p.end.min(e).saturating_sub(p.start.max(s)))
            .sum()
    })
}

/// A phrase counts in full if it shares at least one token with any phrase
/// of the other side in the same sentence.
pub fn binary_overlap(gold: &[Phrase], pred: &[Phrase], polarity: Polarity) -> SpanPrf {
    let gold = of_polarity(gold, polarity);
    let pred = of_polarity(pred, polarity);
    let gold_cover = coverage(&gold);
    let pred_cover = coverage(&pred);
    let hit_pred = pred
        .iter()
        .filter(|p| covered_tokens(p, &gold_cover) > 0)
        .count();
    let hit_gold = gold
        .iter()
        .filter(|g| covered_tokens(g, &pred_cover) > 0)
        .count();
    SpanPrf::from_ratio(hit_pred as f64, pred.len(), hit_gold as f64, gold.len())
}

/// A phrase earns the fraction of its tokens covered by the union of the
/// other side's phrases in the same sentence; credits are averaged.
pub fn proportional_overlap(gold: &[Phrase], pred: &[Phrase], polarity: Polarity) -> SpanPrf {
    let gold = of_polarity(gold, polarity);
    let pred = of_polarity(pred, polarity);
    let gold_cover = coverage(&gold);
    let pred_cover = coverage(&pred);
    let mut p_credit = 0.0;
    for p in &pred {
        p_credit += covered_tokens(p, &gold_cover) as f64 / p.len() as f64;
    }
    let mut r_credit = 0.0;
    for g in &gold {
        r_credit += covered_tokens(g, &pred_cover) as f64 / g.len() as f64;
    }
    SpanPrf::from_ratio(p_credit, pred.len(), r_credit, gold.len())
}
