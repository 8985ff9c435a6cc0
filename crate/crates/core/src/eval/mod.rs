//! Span-overlap metrics, classification reports, and the end-to-end
//! mining + categorization protocol.
//!
//! Span metrics are polarity-strict: an inclusion prediction is only ever
//! compared against inclusion gold phrases in the same sentence. Empty
//! denominators yield 0.

mod classes;
mod e2e;
mod overlap;
mod report;

use thiserror::Error;

use crate::corpus::{parse_dataset, CorpusError, LabeledSentence, Phrase, Polarity};

pub use classes::{
    classification_report, classification_report_with_polarity, ClassMetrics, ClassPrf, ClassReport,
};
pub use e2e::{end_to_end, EndToEndReport, SINK_LABEL};
pub use overlap::{binary_overlap, proportional_overlap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("misaligned inputs: {0}")]
    Misaligned(String),
    #[error("gold has {gold} items but prediction has {pred}")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("nothing to evaluate")]
    EmptyInput,
}

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpanPrf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl SpanPrf {
    pub fn new(precision: f64, recall: f64) -> SpanPrf {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        SpanPrf {
            precision,
            recall,
            f1,
        }
    }

    pub(crate) fn from_ratio(p_num: f64, p_den: usize, r_num: f64, r_den: usize) -> SpanPrf {
        SpanPrf::new(ratio(p_num, p_den), ratio(r_num, r_den))
    }
}

pub(crate) fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// Both overlap metrics for one polarity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PolarityReport {
    pub binary: SpanPrf,
    pub proportional: SpanPrf,
    pub gold_phrases: usize,
    pub predicted_phrases: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalReport {
    pub inclusion: PolarityReport,
    pub exclusion: PolarityReport,
}

impl EvalReport {
    pub fn polarity(&self, p: Polarity) -> &PolarityReport {
        match p {
            Polarity::Inclusion => &self.inclusion,
            Polarity::Exclusion => &self.exclusion,
        }
    }
}

pub fn evaluate_phrases(gold: &[Phrase], pred: &[Phrase]) -> EvalReport {
    let side = |p: Polarity| PolarityReport {
        binary: binary_overlap(gold, pred, p),
        proportional: proportional_overlap(gold, pred, p),
        gold_phrases: gold.iter().filter(|g| g.polarity == p).count(),
        predicted_phrases: pred.iter().filter(|x| x.polarity == p).count(),
    };
    EvalReport {
        inclusion: side(Polarity::Inclusion),
        exclusion: side(Polarity::Exclusion),
    }
}

/// Scores predicted tags against gold tags sentence by sentence. Sentences
/// are paired by position; predicted phrases take the gold sentence id.
pub fn evaluate_labeled(
    gold: &[LabeledSentence],
    pred: &[LabeledSentence],
) -> Result<EvalReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::Misaligned(format!(
            "{} gold sentences vs {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let mut gold_phrases = Vec::new();
    let mut pred_phrases = Vec::new();
    for (k, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.sentence.len() != p.sentence.len() {
            return Err(EvalError::Misaligned(format!(
                "sentence {} ({}) has {} gold tokens vs {} predicted",
                k + 1,
                g.sentence.id,
                g.sentence.len(),
                p.sentence.len()
            )));
        }
        gold_phrases.extend(g.phrases());
        let aligned = LabeledSentence::new(g.sentence.clone(), p.tags().to_vec())?;
        pred_phrases.extend(aligned.phrases());
    }
    Ok(evaluate_phrases(&gold_phrases, &pred_phrases))
}

/// Parses two span dataset files and scores the second against the first.
pub fn evaluate_tag_file(gold_text: &str, pred_text: &str) -> Result<EvalReport, EvalError> {
    let gold = parse_dataset(gold_text)?;
    let pred = parse_dataset(pred_text)?;
    evaluate_labeled(&gold, &pred)
}
