//! Tag-then-classify pipeline and its line-oriented output format:
//!
//! ```text
//! sentence<TAB>id<TAB>phrase count
//! phrase<TAB>start<TAB>end<TAB>polarity<TAB>category<TAB>probability<TAB>text
//! ```
//!
//! One `sentence` record per input sentence, followed by exactly as many
//! `phrase` records as it announces. Spans are half-open token offsets.

use std::fmt::Write as _;

use thiserror::Error;

use crate::classifier::{predict_category, ClassifierModel};
use crate::corpus::{Category, LabeledSentence, Phrase, Polarity, Sentence};
use crate::features::{FeatureConfig, FeatureError};
use crate::model_file::fmt_weight;
use crate::tagger::{viterbi, CrfModel};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelinePhrase {
    pub start: usize,
    pub end: usize,
    pub polarity: Polarity,
    pub category: Category,
    /// Classifier probability of `category`.
    pub probability: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRecord {
    pub sentence_id: String,
    pub phrases: Vec<PipelinePhrase>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineOutput {
    pub records: Vec<PipelineRecord>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct PipelineParseError {
    pub line: usize,
    pub reason: String,
}

fn bad(line: usize, reason: impl Into<String>) -> PipelineParseError {
    PipelineParseError {
        line,
        reason: reason.into(),
    }
}

impl PipelineOutput {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(out, "sentence\t{}\t{}", r.sentence_id, r.phrases.len());
            for p in &r.phrases {
                let _ = writeln!(
                    out,
                    "phrase\t{}\t{}\t{}\t{}\t{}\t{}",
                    p.start,
                    p.end,
                    p.polarity,
                    p.category,
                    fmt_weight(p.probability),
                    p.text
                );
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<PipelineOutput, PipelineParseError> {
        let mut records: Vec<PipelineRecord> = Vec::new();
        let mut pending = 0usize;
        let mut last_line = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let no = lineno + 1;
            last_line = no;
            let line = raw.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            match cols[0] {
                "sentence" => {
                    if pending > 0 {
                        return Err(bad(no, format!("{pending} phrase record(s) missing")));
                    }
                    let [_, id, count] = cols[..] else {
                        return Err(bad(no, "expected sentence<TAB>id<TAB>count"));
                    };
                    pending = count
                        .parse()
                        .map_err(|_| bad(no, format!("bad phrase count {count:?}")))?;
                    records.push(PipelineRecord {
                        sentence_id: id.to_string(),
                        phrases: Vec::with_capacity(pending),
                    });
                }
                "phrase" => {
                    let [_, start, end, pol, cat, prob, text] = cols[..] else {
                        return Err(bad(no, "expected 7 phrase columns"));
                    };
                    let record = match records.last_mut() {
                        Some(r) if pending > 0 => r,
                        _ => return Err(bad(no, "phrase record outside its sentence")),
                    };
                    let start: usize = start.parse().map_err(|_| bad(no, "bad start"))?;
                    let end: usize = end.parse().map_err(|_| bad(no, "bad end"))?;
                    if start >= end {
                        return Err(bad(no, format!("empty span [{start}, {end})")));
                    }
                    let probability: f64 = prob
                        .parse()
                        .ok()
                        .filter(|p| (0.0..=1.0).contains(p))
                        .ok_or_else(|| bad(no, format!("bad probability {prob:?}")))?;
                    record.phrases.push(PipelinePhrase {
                        start,
                        end,
                        polarity: pol
                            .parse()
                            .map_err(|_| bad(no, format!("unknown polarity {pol:?}")))?,
                        category: cat
                            .parse()
                            .map_err(|_| bad(no, format!("unknown category {cat:?}")))?,
                        probability,
                        text: text.to_string(),
                    });
                    pending -= 1;
                }
                other => return Err(bad(no, format!("unknown record {other:?}"))),
            }
        }
        if pending > 0 {
            return Err(bad(
                last_line,
                format!("{pending} phrase record(s) missing"),
            ));
        }
        Ok(PipelineOutput { records })
    }

    /// Categorized phrases of every record, carrying the record's sentence id.
    pub fn phrases(&self) -> Vec<Phrase> {
        self.records
            .iter()
            .flat_map(|r| {
                r.phrases.iter().map(move |p| Phrase {
                    sentence_id: r.sentence_id.clone(),
                    start: p.start,
                    end: p.end,
                    polarity: p.polarity,
                    category: Some(p.category),
                    text: p.text.clone(),
                })
            })
            .collect()
    }
}

/// Classifies every decoded phrase of an already tagged sentence.
pub fn classify_tagged(
    classifier: &ClassifierModel,
    tagged: &LabeledSentence,
) -> Result<PipelineRecord, FeatureError> {
    let sentence = &tagged.sentence;
    let phrases = tagged
        .phrases()
        .into_iter()
        .map(|p| {
            let (category, probs) = predict_category(classifier, &p, sentence)?;
            Ok(PipelinePhrase {
                start: p.start,
                end: p.end,
                polarity: p.polarity,
                category,
                probability: probs.get(category),
                text: p.text,
            })
        })
        .collect::<Result<_, FeatureError>>()?;
    Ok(PipelineRecord {
        sentence_id: sentence.id.clone(),
        phrases,
    })
}

pub fn run_pipeline(
    tagger: &CrfModel,
    cfg: &FeatureConfig<'_>,
    classifier: &ClassifierModel,
    sentences: &[Sentence],
) -> Result<PipelineOutput, FeatureError> {
    let records = sentences
        .iter()
        .map(|s| {
            let tagged = LabeledSentence::new(s.clone(), viterbi(tagger, s, cfg))
                .expect("one tag per token");
            classify_tagged(classifier, &tagged)
        })
        .collect::<Result<_, _>>()?;
    Ok(PipelineOutput { records })
}
