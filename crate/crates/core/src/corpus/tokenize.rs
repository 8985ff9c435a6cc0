use super::Sentence;

/// Whitespace tokenization with leading and trailing punctuation split off
/// into single-character tokens. Inner punctuation such as the apostrophe
/// in `wouldn't` stays.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let lead = chars.iter().take_while(|c| is_punct(**c)).count();
        if lead == chars.len() {
            out.extend(chars.iter().map(char::to_string));
            continue;
        }
        let trail = chars.iter().rev().take_while(|c| is_punct(**c)).count();
        out.extend(chars[..lead].iter().map(char::to_string));
        out.push(chars[lead..chars.len() - trail].iter().collect());
        out.extend(chars[chars.len() - trail..].iter().map(char::to_string));
    }
    out
}

/// One sentence per non-blank line, tokenized; ids are `s1`, `s2`, ... in
/// line order, matching the default ids of dataset files.
pub fn raw_sentences(text: &str) -> Vec<Sentence> {
    text.lines()
        .map(tokenize)
        .filter(|toks| !toks.is_empty())
        .enumerate()
        .map(|(k, toks)| Sentence::new(format!("s{}", k + 1), toks).expect("non-empty tokens"))
        .collect()
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}
