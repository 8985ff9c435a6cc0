//! Sparse feature templates for token emissions and phrase classification,
//! and the plain-text word vector loader.
//!
//! Token features: `bias`, `w{off}=` / `low{off}=` for every offset in the
//! window (out-of-range offsets give `w{off}=<BOS>` or `w{off}=<EOS>`),
//! `pre{2,3}=` / `suf{2,3}=` affixes, `shape0=`, and either `emb{j}` real
//! valued components or `emb_oov` when an embedding table is configured.
//!
//! Phrase features: `bias`, `uni=`, `bi=`, `chr=` character 3-5 grams over the
//! space-padded lowercase text (spaces written as `_`), and `ctx=` for up to
//! two lowercase tokens either side of the span.

use std::collections::{btree_map, BTreeMap, HashMap};

use thiserror::Error;

use crate::corpus::{Phrase, Sentence};

pub const MAX_WINDOW: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("token index {index} out of range for sentence of {len} tokens")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("span [{start}, {end}) out of bounds for sentence of {len} tokens")]
    OutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("line {line}: expected {expected} vector components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unparsable number {value:?}")]
    UnparsableNumber { line: usize, value: String },
    #[error("embedding file contains no vectors")]
    EmptyEmbeddings,
    #[error("window {0} exceeds the maximum of {MAX_WINDOW}")]
    WindowTooLarge(usize),
}

/// Sparse feature map with deterministic (sorted) iteration. Zero values are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: BTreeMap<String, f64>,
}

impl FeatureVector {
    pub fn new() -> FeatureVector {
        FeatureVector::default()
    }

    /// Sets an indicator feature to 1.
    pub fn flag(&mut self, name: impl Into<String>) {
        self.entries.insert(name.into(), 1.0);
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        if value == 0.0 {
            self.entries.remove(&name);
        } else {
            self.entries.insert(name, value);
        }
    }

    /// Adds to a count-valued feature.
    pub fn add(&mut self, name: impl Into<String>, delta: f64) {
        match self.entries.entry(name.into()) {
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += delta;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            btree_map::Entry::Vacant(e) => {
                if delta != 0.0 {
                    e.insert(delta);
                }
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Word vectors keyed by lowercase word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> EmbeddingTable {
        assert!(dim > 0, "embedding dimension must be positive");
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    /// Inserts a vector unless the word is already present. Panics if the
    /// vector length differs from the table dimension.
    pub fn insert(&mut self, word: &str, vector: Vec<f64>) {
        assert_eq!(vector.len(), self.dim);
        self.vectors.entry(word.to_lowercase()).or_insert(vector);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Looks up the lowercase form of `word`.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(&word.to_lowercase()).map(Vec::as_slice)
    }
}

/// Reads `word v1 ... vD` lines (GloVe text format). The first vector fixes
/// the dimension unless `expected_dim` is given. Repeated words keep their
/// first vector.
pub fn load_embeddings(
    text: &str,
    expected_dim: Option<usize>,
) -> Result<EmbeddingTable, FeatureError> {
    let mut table: Option<EmbeddingTable> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let mut parts = line.split_whitespace();
        let Some(word) = parts.next() else { continue };
        let values = parts
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(FeatureError::UnparsableNumber {
                    line: line_no,
                    value: v.to_string(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let expected = table
            .as_ref()
            .map(EmbeddingTable::dim)
            .or(expected_dim)
            .unwrap_or(values.len());
        if values.len() != expected || expected == 0 {
            return Err(FeatureError::DimensionMismatch {
                line: line_no,
                expected: expected.max(1),
                found: values.len(),
            });
        }
        table
            .get_or_insert_with(|| EmbeddingTable::new(expected))
            .insert(word, values);
    }
    table.ok_or(FeatureError::EmptyEmbeddings)
}

/// Serializable part of a [`FeatureConfig`], stored alongside trained models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSpec {
    pub window: usize,
    pub use_affixes: bool,
    pub use_shape: bool,
    pub embedding_dim: Option<usize>,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec {
            window: 1,
            use_affixes: true,
            use_shape: true,
            embedding_dim: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FeatureConfig<'a> {
    pub window: usize,
    pub use_affixes: bool,
    pub use_shape: bool,
    pub embeddings: Option<&'a EmbeddingTable>,
}

impl Default for FeatureConfig<'_> {
    fn default() -> Self {
        FeatureConfig {
            window: 1,
            use_affixes: true,
            use_shape: true,
            embeddings: None,
        }
    }
}

impl<'a> FeatureConfig<'a> {
    pub fn with_embeddings(mut self, table: &'a EmbeddingTable) -> Self {
        self.embeddings = Some(table);
        self
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.window > MAX_WINDOW {
            return Err(FeatureError::WindowTooLarge(self.window));
        }
        Ok(())
    }

    pub fn spec(&self) -> FeatureSpec {
        FeatureSpec {
            window: self.window,
            use_affixes: self.use_affixes,
            use_shape: self.use_shape,
            embedding_dim: self.embeddings.map(EmbeddingTable::dim),
        }
    }

    /// Rebuilds a config from a stored spec. The embedding table must be
    /// present, with matching dimension, exactly when the feature spec names one.
    pub fn from_spec(
        spec: FeatureSpec,
        embeddings: Option<&'a EmbeddingTable>,
    ) -> Result<Self, FeatureError> {
        let found = embeddings.map(EmbeddingTable::dim);
        if found != spec.embedding_dim {
            return Err(FeatureError::DimensionMismatch {
                line: 0,
                expected: spec.embedding_dim.unwrap_or(0),
                found: found.unwrap_or(0),
            });
        }
        let cfg = FeatureConfig {
            window: spec.window,
            use_affixes: spec.use_affixes,
            use_shape: spec.use_shape,
            embeddings,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn offset_label(off: isize) -> String {
    if off > 0 {
        format!("+{off}")
    } else {
        off.to_string()
    }
}

/// Character-class shape with runs collapsed: `Crowded` -> `Xx`, `25` -> `d`.
pub fn word_shape(word: &str) -> String {
    let mut shape = String::new();
    let mut last = None;
    for c in word.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            '·'
        };
        if last != Some(s) {
            shape.push(s);
            last = Some(s);
        }
    }
    shape
}

pub fn token_features(
    sentence: &Sentence,
    i: usize,
    cfg: &FeatureConfig<'_>,
) -> Result<FeatureVector, FeatureError> {
    let n = sentence.len();
    if i >= n {
        return Err(FeatureError::IndexOutOfRange { index: i, len: n });
    }
    let mut fv = FeatureVector::new();
    fv.flag("bias");
    let w = cfg.window as isize;
    for off in -w..=w {
        let label = offset_label(off);
        let j = i as isize + off;
        if j < 0 {
            fv.flag(format!("w{label}=<BOS>"));
        } else if j >= n as isize {
            fv.flag(format!("w{label}=<EOS>"));
        } else {
            let word = sentence.word(j as usize);
            fv.flag(format!("w{label}={word}"));
            fv.flag(format!("low{label}={}", word.to_lowercase()));
        }
    }
    let word = sentence.word(i);
    if cfg.use_affixes {
        let chars: Vec<char> = word.chars().collect();
        for len in [2, 3] {
            if chars.len() >= len {
                let pre: String = chars[..len].iter().collect();
                let suf: String = chars[chars.len() - len..].iter().collect();
                fv.flag(format!("pre{len}={pre}"));
                fv.flag(format!("suf{len}={suf}"));
            }
        }
    }
    if cfg.use_shape {
        fv.flag(format!("shape0={}", word_shape(word)));
    }
    if let Some(table) = cfg.embeddings {
        match table.get(word) {
            Some(v) => {
                for (j, &x) in v.iter().enumerate() {
                    fv.set(format!("emb{j}"), x);
                }
            }
            None => fv.flag("emb_oov"),
        }
    }
    Ok(fv)
}

pub fn phrase_features(
    phrase: &Phrase,
    sentence: &Sentence,
) -> Result<FeatureVector, FeatureError> {
    span_features(sentence, phrase.start, phrase.end)
}

/// Phrase features for the span `[start, end)` of `sentence`.
pub fn span_features(
    sentence: &Sentence,
    start: usize,
    end: usize,
) -> Result<FeatureVector, FeatureError> {
    let n = sentence.len();
    if start >= end || end > n {
        return Err(FeatureError::OutOfBounds { start, end, len: n });
    }
    let mut fv = FeatureVector::new();
    fv.flag("bias");
    let lower: Vec<String> = (start..end)
        .map(|i| sentence.word(i).to_lowercase())
        .collect();
    for w in &lower {
        fv.add(format!("uni={w}"), 1.0);
    }
    for pair in lower.windows(2) {
        fv.add(format!("bi={}_{}", pair[0], pair[1]), 1.0);
    }
    let padded: Vec<char> = format!(" {} ", lower.join(" "))
        .replace(' ', "_")
        .chars()
        .collect();
    for len in 3..=5 {
        for gram in padded.windows(len) {
            fv.add(format!("chr={}", gram.iter().collect::<String>()), 1.0);
        }
    }
    for i in start.saturating_sub(2)..start {
        fv.add(format!("ctx={}", sentence.word(i).to_lowercase()), 1.0);
    }
    for i in end..(end + 2).min(n) {
        fv.add(format!("ctx={}", sentence.word(i).to_lowercase()), 1.0);
    }
    Ok(fv)
}
