use std::fmt::Write as _;

use super::{BioTag, Category, CorpusError, LabeledSentence, Polarity, Sentence};

const ID_PREFIX: &str = "#id ";
const SPOT_PREFIX: &str = "#spot ";

/// Id given to the `k`-th (0-based) sentence of a file that has no `#id` line.
pub(crate) fn default_sentence_id(k: usize) -> String {
    format!("s{}", k + 1)
}

#[derive(Default)]
struct Block {
    id: Option<String>,
    spot: Option<String>,
    words: Vec<String>,
    tags: Vec<BioTag>,
    categories: Vec<Option<Category>>,
    first_line: usize,
}

impl Block {
    fn has_content(&self) -> bool {
        !self.words.is_empty() || self.id.is_some() || self.spot.is_some()
    }

    fn finish(self, k: usize) -> Result<Option<LabeledSentence>, CorpusError> {
        if self.words.is_empty() {
            return if self.has_content() {
                Err(CorpusError::MalformedLine {
                    line: self.first_line,
                    content: "sentence block without tokens".into(),
                })
            } else {
                Ok(None)
            };
        }
        let id = self.id.unwrap_or_else(|| default_sentence_id(k));
        let mut sentence = Sentence::new(id, self.words).map_err(|e| match e {
            CorpusError::InvalidToken(t) => CorpusError::MalformedLine {
                line: self.first_line,
                content: t,
            },
            other => other,
        })?;
        sentence.source_spot = self.spot;
        LabeledSentence::with_categories(sentence, self.tags, self.categories).map(Some)
    }
}

/// Parses a span dataset: `token<TAB>tag[<TAB>category]` lines, blank lines
/// between sentences, and optional `#id` / `#spot` lines opening a block.
pub fn parse_dataset(text: &str) -> Result<Vec<LabeledSentence>, CorpusError> {
    parse_blocks(text, true)
}

/// Reads the sentences of a span dataset file while ignoring every column
/// after the token, so untagged `token`-only files are accepted too.
pub fn parse_sentences(text: &str) -> Result<Vec<Sentence>, CorpusError> {
    Ok(parse_blocks(text, false)?
        .into_iter()
        .map(|ls| ls.sentence)
        .collect())
}

fn parse_blocks(text: &str, labeled: bool) -> Result<Vec<LabeledSentence>, CorpusError> {
    let mut out = Vec::new();
    let mut block = Block::default();
    for (lineno, raw) in text.split('\n').enumerate() {
        let line_no = lineno + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            let done = std::mem::take(&mut block);
            if let Some(s) = done.finish(out.len())? {
                out.push(s);
            }
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            if let Some(id) = line.strip_prefix(ID_PREFIX) {
                if !block.words.is_empty() || block.id.is_some() {
                    let done = std::mem::take(&mut block);
                    if let Some(s) = done.finish(out.len())? {
                        out.push(s);
                    }
                }
                block.id = Some(id.to_string());
                block.first_line = line_no;
            } else if let Some(spot) = line.strip_prefix(SPOT_PREFIX) {
                block.spot = Some(spot.to_string());
                if block.first_line == 0 {
                    block.first_line = line_no;
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let min_cols = if labeled { 2 } else { 1 };
        if !(min_cols..=3).contains(&cols.len()) || cols[0].is_empty() {
            return Err(CorpusError::MalformedLine {
                line: line_no,
                content: line.to_string(),
            });
        }
        let (tag, category) =
            if labeled {
                let tag = cols[1]
                    .parse::<BioTag>()
                    .map_err(|_| CorpusError::UnknownTag {
                        line: line_no,
                        tag: cols[1].to_string(),
                    })?;
                let category =
                    match cols.get(2) {
                        Some(c) => Some(c.parse::<Category>().map_err(|_| {
                            CorpusError::UnknownCategory {
                                line: line_no,
                                category: c.to_string(),
                            }
                        })?),
                        None => None,
                    };
                (tag, category)
            } else {
                (BioTag::O, None)
            };
        if block.first_line == 0 {
            block.first_line = line_no;
        }
        block.words.push(cols[0].to_string());
        block.tags.push(tag);
        block.categories.push(category);
    }
    if let Some(s) = block.finish(out.len())? {
        out.push(s);
    }
    if out.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    Ok(out)
}

/// Inverse of [`parse_dataset`]. `#id` lines are written only for ids that
/// differ from the positional default.
pub fn serialize_dataset(sentences: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for (k, ls) in sentences.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let s = &ls.sentence;
        if s.id != default_sentence_id(k) {
            let _ = writeln!(out, "{ID_PREFIX}{}", s.id);
        }
        if let Some(spot) = &s.source_spot {
            let _ = writeln!(out, "{SPOT_PREFIX}{spot}");
        }
        for ((word, tag), cat) in s.words().zip(ls.tags()).zip(ls.categories()) {
            match cat {
                Some(c) => {
                    let _ = writeln!(out, "{word}\t{tag}\t{c}");
                }
                None => {
                    let _ = writeln!(out, "{word}\t{tag}");
                }
            }
        }
    }
    out
}

/// A phrase with its gold category, plus the sentence it came from so that
/// context tokens are available to the classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryExample {
    pub sentence: Sentence,
    pub start: usize,
    pub end: usize,
    pub category: Category,
    pub polarity: Option<Polarity>,
}

impl CategoryExample {
    /// An example whose sentence is just the phrase itself (no context).
    pub fn from_text(
        id: impl Into<String>,
        text: &str,
        category: Category,
    ) -> Result<CategoryExample, CorpusError> {
        let sentence = Sentence::new(id, text.split_whitespace())?;
        let end = sentence.len();
        Ok(CategoryExample {
            sentence,
            start: 0,
            end,
            category,
            polarity: None,
        })
    }

    pub fn text(&self) -> String {
        self.sentence.span_text(self.start, self.end)
    }

    /// Every categorized phrase of a labeled sentence, in span order.
    pub fn from_labeled(ls: &LabeledSentence) -> Vec<CategoryExample> {
        ls.phrases()
            .into_iter()
            .filter_map(|p| {
                p.category.map(|category| CategoryExample {
                    sentence: ls.sentence.clone(),
                    start: p.start,
                    end: p.end,
                    category,
                    polarity: Some(p.polarity),
                })
            })
            .collect()
    }
}

/// Parses `category<TAB>phrase text[<TAB>polarity]` lines. Blank lines and
/// `#` comments are skipped.
pub fn parse_category_dataset(text: &str) -> Result<Vec<CategoryExample>, CorpusError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&cols.len()) || cols[1].trim().is_empty() {
            return Err(CorpusError::MalformedLine {
                line: line_no,
                content: line.to_string(),
            });
        }
        let category = cols[0]
            .parse::<Category>()
            .map_err(|_| CorpusError::UnknownCategory {
                line: line_no,
                category: cols[0].to_string(),
            })?;
        let mut example =
            CategoryExample::from_text(format!("c{}", out.len() + 1), cols[1], category).map_err(
                |_| CorpusError::MalformedLine {
                    line: line_no,
                    content: line.to_string(),
                },
            )?;
        if let Some(p) = cols.get(2) {
            example.polarity = Some(p.parse().map_err(|_| CorpusError::UnknownPolarity {
                line: line_no,
                polarity: p.to_string(),
            })?);
        }
        out.push(example);
    }
    if out.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    Ok(out)
}

pub fn serialize_category_dataset(examples: &[CategoryExample]) -> String {
    let mut out = String::new();
    for ex in examples {
        let _ = match ex.polarity {
            Some(p) => writeln!(out, "{}\t{}\t{}", ex.category, ex.text(), p),
            None => writeln!(out, "{}\t{}", ex.category, ex.text()),
        };
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetStats {
    pub sentences: usize,
    pub tokens: usize,
    /// Token counts in canonical tag order.
    pub tags: [usize; BioTag::COUNT],
    /// Phrase counts in canonical category order.
    pub phrases_by_category: [usize; Category::COUNT],
    pub uncategorized_phrases: usize,
    pub inclusion_phrases: usize,
    pub exclusion_phrases: usize,
}

impl DatasetStats {
    pub fn tag_count(&self, tag: BioTag) -> usize {
        self.tags[tag.index()]
    }

    pub fn category_count(&self, c: Category) -> usize {
        self.phrases_by_category[c.index()]
    }

    pub fn total_phrases(&self) -> usize {
        self.inclusion_phrases + self.exclusion_phrases
    }
}

pub fn dataset_stats(sentences: &[LabeledSentence]) -> DatasetStats {
    let mut stats = DatasetStats {
        sentences: sentences.len(),
        ..Default::default()
    };
    for ls in sentences {
        stats.tokens += ls.tags().len();
        for t in ls.tags() {
            stats.tags[t.index()] += 1;
        }
        for p in ls.phrases() {
            match p.polarity {
                Polarity::Inclusion => stats.inclusion_phrases += 1,
                Polarity::Exclusion => stats.exclusion_phrases += 1,
            }
            match p.category {
                Some(c) => stats.phrases_by_category[c.index()] += 1,
                None => stats.uncategorized_phrases += 1,
            }
        }
    }
    stats
}

/// Per-category example counts in canonical order.
pub fn category_stats(examples: &[CategoryExample]) -> [usize; Category::COUNT] {
    let mut counts = [0; Category::COUNT];
    for ex in examples {
        counts[ex.category.index()] += 1;
    }
    counts
}
