//! Synthetic corpora in which every token's tag is a fixed function of the
//! token, for smoke tests and learnability checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{BioTag, Category, LabeledSentence, Sentence};

const WORDS_PER_TAG: usize = 12;

/// Surface form of the `k`-th word that always carries `tag`.
pub fn word_for(tag: BioTag, k: usize) -> String {
    let stem = match tag {
        BioTag::BeginInc => "welcome",
        BioTag::Inc => "friendly",
        BioTag::BeginExc => "banned",
        BioTag::Exc => "awful",
        BioTag::O => "plain",
    };
    format!("{stem}{k}")
}

/// The tag a synthetic word was generated for, if it is one.
pub fn tag_of(word: &str) -> Option<BioTag> {
    BioTag::ALL
        .into_iter()
        .find(|&t| (0..WORDS_PER_TAG).any(|k| word_for(t, k) == word))
}

/// Category carried by a phrase whose first word is the `k`-th begin word.
pub fn category_for(k: usize) -> Category {
    Category::ALL[k % Category::COUNT]
}

/// `n` sentences of 3 to 12 tokens. Phrases are a begin word followed by
/// zero to three inside words of the same polarity; each phrase is labeled
/// with [`category_for`] of its begin word.
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<LabeledSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|s| {
            let target = rng.gen_range(3..=12);
            let mut words = Vec::new();
            let mut tags = Vec::new();
            let mut cats = Vec::new();
            while words.len() < target {
                if rng.gen_bool(0.3) {
                    let exclusion = rng.gen_bool(0.5);
                    let (b, i) = if exclusion {
                        (BioTag::BeginExc, BioTag::Exc)
                    } else {
                        (BioTag::BeginInc, BioTag::Inc)
                    };
                    let k = rng.gen_range(0..WORDS_PER_TAG);
                    let cat = Some(category_for(k));
                    words.push(word_for(b, k));
                    tags.push(b);
                    cats.push(cat);
                    for _ in 0..rng.gen_range(0..=3) {
                        words.push(word_for(i, rng.gen_range(0..WORDS_PER_TAG)));
                        tags.push(i);
                        cats.push(cat);
                    }
                } else {
                    words.push(word_for(BioTag::O, rng.gen_range(0..WORDS_PER_TAG)));
                    tags.push(BioTag::O);
                    cats.push(None);
                }
            }
            let sentence =
                Sentence::new(format!("syn{}", s + 1), words).expect("generated tokens are valid");
            LabeledSentence::with_categories(sentence, tags, cats)
                .expect("columns have equal length")
        })
        .collect()
}
