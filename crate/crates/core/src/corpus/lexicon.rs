use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Category, CorpusError, Sentence};

/// Per-category keyword sets used to pre-filter review sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeywordLexicon {
    keywords: BTreeMap<Category, BTreeSet<String>>,
}

impl KeywordLexicon {
    pub fn new() -> KeywordLexicon {
        KeywordLexicon::default()
    }

    /// Adds a keyword, lowercased and trimmed. Returns `false` for an empty keyword.
    pub fn insert(&mut self, category: Category, keyword: &str) -> bool {
        let kw = keyword.trim().to_lowercase();
        if kw.is_empty() {
            return false;
        }
        self.keywords.entry(category).or_default().insert(kw);
        true
    }

    pub fn keywords(&self, category: Category) -> Option<&BTreeSet<String>> {
        self.keywords.get(&category)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Category, &BTreeSet<String>)> + '_ {
        self.keywords.iter().map(|(c, k)| (*c, k))
    }

    pub fn len(&self) -> usize {
        self.keywords.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn inverted(&self) -> HashMap<&str, Vec<Category>> {
        let mut index: HashMap<&str, Vec<Category>> = HashMap::new();
        for (c, kws) in &self.keywords {
            for kw in kws {
                index.entry(kw.as_str()).or_default().push(*c);
            }
        }
        index
    }
}

/// Reads `category<TAB>keyword` lines; `#` lines and blank lines are skipped.
pub fn load_lexicon(text: &str) -> Result<KeywordLexicon, CorpusError> {
    let mut lex = KeywordLexicon::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = || CorpusError::MalformedLine {
            line: lineno + 1,
            content: line.to_string(),
        };
        let (cat, kw) = line.split_once('\t').ok_or_else(malformed)?;
        if kw.contains('\t') {
            return Err(malformed());
        }
        let category =
            cat.trim()
                .parse::<Category>()
                .map_err(|_| CorpusError::UnknownCategory {
                    line: lineno + 1,
                    category: cat.to_string(),
                })?;
        if !lex.insert(category, kw) {
            return Err(malformed());
        }
    }
    Ok(lex)
}

/// Keeps sentences with at least one token whose lowercase form is a keyword,
/// paired with every category that matched. Input order is preserved.
pub fn filter_sentences<'a>(
    sentences: &'a [Sentence],
    lexicon: &KeywordLexicon,
) -> Vec<(&'a Sentence, BTreeSet<Category>)> {
    let index = lexicon.inverted();
    sentences
        .iter()
        .filter_map(|s| {
            let matched: BTreeSet<Category> = s
                .words()
                .filter_map(|w| index.get(w.to_lowercase().as_str()))
                .flatten()
                .copied()
                .collect();
            (!matched.is_empty()).then_some((s, matched))
        })
        .collect()
}
