//! Line-oriented text model files shared by the tagger and the classifier.
//!
//! ```text
//! #version 1
//! #type crf|clf
//! ...type-specific header lines...
//! <weight lines>
//! #end
//! ```
//!
//! Weights are written with Rust's shortest round-trip float formatting so a
//! reload is bit-exact. The trailing `#end` line detects truncated files.

use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unsupported model version {found:?} (expected {FORMAT_VERSION})")]
    VersionMismatch { found: String },
    #[error("line {line}: malformed model: {reason}")]
    MalformedModel { line: usize, reason: String },
}

pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> ModelError {
    ModelError::MalformedModel {
        line,
        reason: reason.into(),
    }
}

pub(crate) fn fmt_weight(w: f64) -> String {
    format!("{w:?}")
}

pub(crate) fn parse_weight(s: &str, line: usize) -> Result<f64, ModelError> {
    match s.parse::<f64>() {
        Ok(w) if w.is_finite() => Ok(w),
        _ => Err(malformed(line, format!("bad weight {s:?}"))),
    }
}

/// Cursor over the lines of a model file with 1-based line numbers.
pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Lines<'a> {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    pub(crate) fn line_no(&self) -> usize {
        self.last
    }

    pub(crate) fn next_line(&mut self) -> Option<&'a str> {
        self.inner.next().map(|(i, l)| {
            self.last = i + 1;
            l.trim_end_matches('\r')
        })
    }

    /// Reads `#<key> <value>` and returns the value.
    pub(crate) fn header(&mut self, key: &str) -> Result<&'a str, ModelError> {
        let line = self
            .next_line()
            .ok_or_else(|| malformed(self.last + 1, format!("missing #{key} header")))?;
        line.strip_prefix('#')
            .and_then(|l| l.strip_prefix(key))
            .and_then(|l| l.strip_prefix(' '))
            .ok_or_else(|| malformed(self.last, format!("expected #{key} header, found {line:?}")))
    }

    /// Checks version and type lines.
    pub(crate) fn preamble(&mut self, kind: &str) -> Result<(), ModelError> {
        let version = self.header("version")?;
        if version.trim() != FORMAT_VERSION.to_string() {
            return Err(ModelError::VersionMismatch {
                found: version.trim().to_string(),
            });
        }
        let found = self.header("type")?;
        if found != kind {
            return Err(malformed(
                self.last,
                format!("expected model type {kind:?}, found {found:?}"),
            ));
        }
        Ok(())
    }
}

pub(crate) fn write_preamble(out: &mut String, kind: &str) {
    out.push_str(&format!("#version {FORMAT_VERSION}\n#type {kind}\n"));
}
