//! Sentences, BIO tags, phrase spans, and the text formats used to store them.
//!
//! The span dataset is a CoNLL-style file with one `token<TAB>tag` line per
//! token and a blank line between sentences. An optional third column carries
//! the phrase category on phrase tokens. The tag inventory is the five-symbol
//! scheme `B_INC INC B_EXC EXC O`; inside tags carry no `I_` prefix.

mod format;
mod lexicon;
mod spans;
mod split;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use format::{
    category_stats, dataset_stats, parse_category_dataset, parse_dataset, parse_sentences,
    serialize_category_dataset, serialize_dataset, CategoryExample, DatasetStats,
};
pub use lexicon::{filter_sentences, load_lexicon, KeywordLexicon};
pub use spans::{decode_phrases, encode_tags};
pub use split::train_test_split;
pub use tokenize::{raw_sentences, tokenize};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: malformed line {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("line {line}: unknown tag {tag:?}")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: unknown category {category:?}")]
    UnknownCategory { line: usize, category: String },
    #[error("line {line}: unknown polarity {polarity:?}")]
    UnknownPolarity { line: usize, polarity: String },
    #[error("dataset contains no sentences")]
    EmptyDataset,
    #[error("tag count {tags} does not match token count {tokens}")]
    LengthMismatch { tags: usize, tokens: usize },
    #[error("phrases [{0}, {1}) and [{2}, {3}) overlap")]
    OverlappingPhrases(usize, usize, usize, usize),
    #[error("span [{start}, {end}) is outside a sentence of {len} tokens")]
    OutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("invalid token {0:?}: tokens must be non-empty and contain no whitespace")]
    InvalidToken(String),
    #[error("a sentence needs at least one token")]
    EmptySentence,
}

/// BIO tag in canonical order. The discriminant is the tag's column index
/// everywhere a dense tag dimension is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BioTag {
    BeginInc = 0,
    Inc = 1,
    BeginExc = 2,
    Exc = 3,
    O = 4,
}

impl BioTag {
    pub const COUNT: usize = 5;
    pub const ALL: [BioTag; 5] = [
        BioTag::BeginInc,
        BioTag::Inc,
        BioTag::BeginExc,
        BioTag::Exc,
        BioTag::O,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<BioTag> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BioTag::BeginInc => "B_INC",
            BioTag::Inc => "INC",
            BioTag::BeginExc => "B_EXC",
            BioTag::Exc => "EXC",
            BioTag::O => "O",
        }
    }

    /// `None` for `O`.
    pub fn polarity(self) -> Option<Polarity> {
        match self {
            BioTag::BeginInc | BioTag::Inc => Some(Polarity::Inclusion),
            BioTag::BeginExc | BioTag::Exc => Some(Polarity::Exclusion),
            BioTag::O => None,
        }
    }

    pub fn is_begin(self) -> bool {
        matches!(self, BioTag::BeginInc | BioTag::BeginExc)
    }

    pub fn begin(polarity: Polarity) -> BioTag {
        match polarity {
            Polarity::Inclusion => BioTag::BeginInc,
            Polarity::Exclusion => BioTag::BeginExc,
        }
    }

    pub fn inside(polarity: Polarity) -> BioTag {
        match polarity {
            Polarity::Inclusion => BioTag::Inc,
            Polarity::Exclusion => BioTag::Exc,
        }
    }
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown symbol {0:?}")]
pub struct UnknownSymbol(pub String);

impl FromStr for BioTag {
    type Err = UnknownSymbol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BioTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownSymbol(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Inclusion,
    Exclusion,
}

impl Polarity {
    pub const ALL: [Polarity; 2] = [Polarity::Inclusion, Polarity::Exclusion];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Inclusion => "inclusion",
            Polarity::Exclusion => "exclusion",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = UnknownSymbol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inclusion" | "inc" => Ok(Polarity::Inclusion),
            "exclusion" | "exc" => Ok(Polarity::Exclusion),
            _ => Err(UnknownSymbol(s.to_string())),
        }
    }
}

/// The eleven inclusion/exclusion factors, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    AgeHeight = 0,
    Claustrophobia,
    CouplesFamily,
    Crowd,
    Food,
    Handicap,
    Hygiene,
    Parking,
    Price,
    Queues,
    Time,
}

impl Category {
    pub const COUNT: usize = 11;
    pub const ALL: [Category; 11] = [
        Category::AgeHeight,
        Category::Claustrophobia,
        Category::CouplesFamily,
        Category::Crowd,
        Category::Food,
        Category::Handicap,
        Category::Hygiene,
        Category::Parking,
        Category::Price,
        Category::Queues,
        Category::Time,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Category> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::AgeHeight => "age_height",
            Category::Claustrophobia => "claustrophobia",
            Category::CouplesFamily => "couples_family",
            Category::Crowd => "crowd",
            Category::Food => "food",
            Category::Handicap => "handicap",
            Category::Hygiene => "hygiene",
            Category::Parking => "parking",
            Category::Price => "price",
            Category::Queues => "queues",
            Category::Time => "time",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = UnknownSymbol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownSymbol(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub index: usize,
}

/// A tokenized sentence. Token indices are always `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub id: String,
    tokens: Vec<Token>,
    pub source_spot: Option<String>,
}

impl Sentence {
    pub fn new<I, S>(id: impl Into<String>, words: I) -> Result<Sentence, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens = words
            .into_iter()
            .enumerate()
            .map(|(index, w)| {
                let text = w.into();
                if text.is_empty() || text.chars().any(char::is_whitespace) {
                    Err(CorpusError::InvalidToken(text))
                } else {
                    Ok(Token { text, index })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if tokens.is_empty() {
            return Err(CorpusError::EmptySentence);
        }
        Ok(Sentence {
            id: id.into(),
            tokens,
            source_spot: None,
        })
    }

    pub fn with_source_spot(mut self, spot: impl Into<String>) -> Sentence {
        self.source_spot = Some(spot.into());
        self
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn word(&self, i: usize) -> &str {
        &self.tokens[i].text
    }

    pub fn words(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().map(|t| t.text.as_str())
    }

    /// Space-joined tokens of `[start, end)`.
    pub fn span_text(&self, start: usize, end: usize) -> String {
        self.tokens[start..end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A sentence with one tag per token. Tags are taken as given; structurally
/// invalid sequences are repaired when phrases are decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSentence {
    pub sentence: Sentence,
    tags: Vec<BioTag>,
    categories: Vec<Option<Category>>,
}

impl LabeledSentence {
    pub fn new(sentence: Sentence, tags: Vec<BioTag>) -> Result<LabeledSentence, CorpusError> {
        let n = sentence.len();
        LabeledSentence::with_categories(sentence, tags, vec![None; n])
    }

    /// Per-token categories; a phrase takes the category of its first token.
    pub fn with_categories(
        sentence: Sentence,
        tags: Vec<BioTag>,
        categories: Vec<Option<Category>>,
    ) -> Result<LabeledSentence, CorpusError> {
        if tags.len() != sentence.len() {
            return Err(CorpusError::LengthMismatch {
                tags: tags.len(),
                tokens: sentence.len(),
            });
        }
        if categories.len() != sentence.len() {
            return Err(CorpusError::LengthMismatch {
                tags: categories.len(),
                tokens: sentence.len(),
            });
        }
        Ok(LabeledSentence {
            sentence,
            tags,
            categories,
        })
    }

    /// Builds the tag and category columns from a set of disjoint phrases.
    pub fn from_phrases(
        sentence: Sentence,
        phrases: &[Phrase],
    ) -> Result<LabeledSentence, CorpusError> {
        let tags = encode_tags(phrases, sentence.len())?;
        let mut categories = vec![None; sentence.len()];
        for p in phrases {
            for c in &mut categories[p.start..p.end] {
                *c = p.category;
            }
        }
        LabeledSentence::with_categories(sentence, tags, categories)
    }

    pub fn tags(&self) -> &[BioTag] {
        &self.tags
    }

    pub fn categories(&self) -> &[Option<Category>] {
        &self.categories
    }

    pub fn phrases(&self) -> Vec<Phrase> {
        let mut phrases =
            decode_phrases(&self.tags, &self.sentence).expect("tags and tokens have equal length");
        for p in &mut phrases {
            p.category = self.categories[p.start];
        }
        phrases
    }
}

/// A contiguous half-open token span `[start, end)` with a polarity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Phrase {
    pub sentence_id: String,
    pub start: usize,
    pub end: usize,
    pub polarity: Polarity,
    pub category: Option<Category>,
    pub text: String,
}

impl Phrase {
    pub fn new(
        sentence: &Sentence,
        start: usize,
        end: usize,
        polarity: Polarity,
    ) -> Result<Phrase, CorpusError> {
        if start >= end || end > sentence.len() {
            return Err(CorpusError::OutOfBounds {
                start,
                end,
                len: sentence.len(),
            });
        }
        Ok(Phrase {
            sentence_id: sentence.id.clone(),
            start,
            end,
            polarity,
            category: None,
            text: sentence.span_text(start, end),
        })
    }

    pub fn with_category(mut self, category: Category) -> Phrase {
        self.category = Some(category);
        self
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Number of shared tokens with `other`, ignoring sentence ids.
    pub fn intersection(&self, other: &Phrase) -> usize {
        self.end
            .min(other.end)
            .saturating_sub(self.start.max(other.start))
    }
}
