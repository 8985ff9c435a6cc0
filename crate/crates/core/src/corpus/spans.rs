use super::{BioTag, CorpusError, Phrase, Polarity, Sentence};

/// Converts a tag sequence into maximal phrase runs.
///
/// An inside tag with no open phrase of the same polarity opens a new phrase,
/// so every non-`O` token ends up inside exactly one phrase. A begin tag, or
/// an inside tag of the other polarity, closes whatever phrase is open.
pub fn decode_phrases(tags: &[BioTag], sentence: &Sentence) -> Result<Vec<Phrase>, CorpusError> {
    if tags.len() != sentence.len() {
        return Err(CorpusError::LengthMismatch {
            tags: tags.len(),
            tokens: sentence.len(),
        });
    }
    let mut phrases = Vec::new();
    let mut open: Option<(usize, Polarity)> = None;
    let mut close = |open: &mut Option<(usize, Polarity)>, end: usize| {
        if let Some((start, polarity)) = open.take() {
            phrases.push(make_phrase(sentence, start, end, polarity));
        }
    };
    for (i, &tag) in tags.iter().enumerate() {
        match tag.polarity() {
            None => close(&mut open, i),
            Some(polarity) => {
                let continues = !tag.is_begin() && matches!(open, Some((_, p)) if p == polarity);
                if !continues {
                    close(&mut open, i);
                    open = Some((i, polarity));
                }
            }
        }
    }
    close(&mut open, tags.len());
    Ok(phrases)
}

fn make_phrase(sentence: &Sentence, start: usize, end: usize, polarity: Polarity) -> Phrase {
    Phrase {
        sentence_id: sentence.id.clone(),
        start,
        end,
        polarity,
        category: None,
        text: sentence.span_text(start, end),
    }
}

/// Canonical BIO encoding of disjoint phrases over `length` tokens.
pub fn encode_tags(phrases: &[Phrase], length: usize) -> Result<Vec<BioTag>, CorpusError> {
    let mut sorted: Vec<&Phrase> = phrases.iter().collect();
    sorted.sort_by_key(|p| (p.start, p.end));
    for p in &sorted {
        if p.start >= p.end || p.end > length {
            return Err(CorpusError::OutOfBounds {
                start: p.start,
                end: p.end,
                len: length,
            });
        }
    }
    for w in sorted.windows(2) {
        if w[1].start < w[0].end {
            return Err(CorpusError::OverlappingPhrases(
                w[0].start, w[0].end, w[1].start, w[1].end,
            ));
        }
    }
    let mut tags = vec![BioTag::O; length];
    for p in sorted {
        tags[p.start] = BioTag::begin(p.polarity);
        for t in &mut tags[p.start + 1..p.end] {
            *t = BioTag::inside(p.polarity);
        }
    }
    Ok(tags)
}
