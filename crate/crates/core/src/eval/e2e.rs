use std::collections::HashMap;

use super::classes::ClassMetrics;
use super::SpanPrf;
use crate::corpus::{Category, Phrase, Polarity};

/// Label index of the sink class in [`EndToEndReport::classes`].
pub const SINK_LABEL: usize = Category::COUNT;

#[derive(Debug, Clone, PartialEq)]
pub struct EndToEndReport {
    pub overall: SpanPrf,
    pub inclusion: SpanPrf,
    pub exclusion: SpanPrf,
    /// Gold phrase index each prediction was matched to; `None` is the sink.
    pub matches: Vec<Option<usize>>,
    /// Whether each prediction matched a gold phrase of the same polarity
    /// and category.
    pub correct: Vec<bool>,
    pub gold_phrases: usize,
    pub predicted_phrases: usize,
    /// 12-label matrix (11 categories plus `sink`). Each prediction adds one
    /// row entry under its matched gold label (sink when unmatched); each
    /// gold phrase no prediction was matched to adds an entry in the sink
    /// column.
    pub classes: ClassMetrics,
}

impl EndToEndReport {
    pub fn sink_predictions(&self) -> usize {
        self.matches.iter().filter(|m| m.is_none()).count()
    }

    pub fn correct_predictions(&self) -> usize {
        self.correct.iter().filter(|&&c| c).count()
    }
}

/// Gold phrase with the largest token intersection in the same sentence;
/// ties go to the smaller start, then the earlier index.
fn best_match(p: &Phrase, gold: &[Phrase], candidates: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for &gi in candidates {
        let inter = p.intersection(&gold[gi]);
        if inter == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bi, b_inter)) => {
                inter > b_inter || (inter == b_inter && gold[gi].start < gold[bi].start)
            }
        };
        if better {
            best = Some((gi, inter));
        }
    }
    best.map(|(gi, _)| gi)
}

/// Matches every predicted phrase to a gold phrase by maximum intersection
/// and scores category agreement. Predictions with no intersecting gold
/// phrase fall into the sink and only cost precision; gold phrases no
/// correct prediction was matched to cost recall.
pub fn end_to_end(gold: &[Phrase], pred: &[Phrase]) -> EndToEndReport {
    let mut by_sentence: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, g) in gold.iter().enumerate() {
        by_sentence
            .entry(g.sentence_id.as_str())
            .or_default()
            .push(i);
    }
    let matches: Vec<Option<usize>> = pred
        .iter()
        .map(|p| {
            by_sentence
                .get(p.sentence_id.as_str())
                .and_then(|c| best_match(p, gold, c))
        })
        .collect();
    let correct: Vec<bool> = pred
        .iter()
        .zip(&matches)
        .map(|(p, m)| {
            m.is_some_and(|gi| {
                let g = &gold[gi];
                g.category.is_some() && g.category == p.category && g.polarity == p.polarity
            })
        })
        .collect();
    let mut recalled = vec![false; gold.len()];
    let mut matched = vec![false; gold.len()];
    for (m, &ok) in matches.iter().zip(&correct) {
        if let Some(gi) = *m {
            matched[gi] = true;
            recalled[gi] |= ok;
        }
    }

    let score = |want: Option<Polarity>| {
        let keep = |pol: Polarity| want.is_none_or(|w| w == pol);
        let n_pred = pred.iter().filter(|p| keep(p.polarity)).count();
        let n_correct = pred
            .iter()
            .zip(&correct)
            .filter(|(p, &ok)| ok && keep(p.polarity))
            .count();
        let n_gold = gold.iter().filter(|g| keep(g.polarity)).count();
        let n_recalled = gold
            .iter()
            .zip(&recalled)
            .filter(|(g, &r)| r && keep(g.polarity))
            .count();
        SpanPrf::from_ratio(n_correct as f64, n_pred, n_recalled as f64, n_gold)
    };

    let label = |c: Option<Category>| c.map_or(SINK_LABEL, Category::index);
    let mut g_labels = Vec::new();
    let mut p_labels = Vec::new();
    for (p, m) in pred.iter().zip(&matches) {
        g_labels.push(m.map_or(SINK_LABEL, |gi| label(gold[gi].category)));
        p_labels.push(label(p.category));
    }
    for (g, &was_matched) in gold.iter().zip(&matched) {
        if !was_matched {
            g_labels.push(label(g.category));
            p_labels.push(SINK_LABEL);
        }
    }
    let mut names: Vec<String> = Category::ALL.iter().map(|c| c.to_string()).collect();
    names.push("sink".into());

    EndToEndReport {
        overall: score(None),
        inclusion: score(Some(Polarity::Inclusion)),
        exclusion: score(Some(Polarity::Exclusion)),
        matches,
        correct,
        gold_phrases: gold.len(),
        predicted_phrases: pred.len(),
        classes: ClassMetrics::from_indices(names, &g_labels, &p_labels),
    }
}
