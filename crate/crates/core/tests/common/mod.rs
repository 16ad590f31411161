//! Random valid documents for property tests.
#![allow(dead_code)]

use corefmark_core::model::{
    Animacy, CohesiveFunction, Document, Gender, Mention, MentionCategory, NumberAttr, PronounType, Span,
};
use proptest::prelude::*;
use proptest::sample::select;

const WORDS: &[&str] = &[
    "the", "The", "a", "an", "salt", "Biles", "coach", "'s", "s'", "I", "i", "we", "it", "she", "he", "they",
    "national", "team", "arrived", "late", ".", ",", "minimum", "wage", "current",
];

#[derive(Debug, Clone)]
struct MentionSeed {
    sent: usize,
    start: usize,
    len: usize,
    chain: usize,
    category: MentionCategory,
    gender: Gender,
    number: NumberAttr,
    animacy: Animacy,
    function: Option<CohesiveFunction>,
    pronoun_type: Option<PronounType>,
}

fn mention_seed() -> impl Strategy<Value = MentionSeed> {
    (
        (0usize..8, 0usize..16, 1usize..5, 0usize..5),
        select(MentionCategory::ALL),
        select(Gender::ALL),
        select(NumberAttr::ALL),
        select(Animacy::ALL),
        proptest::option::of(select(CohesiveFunction::ALL)),
        proptest::option::of(select(PronounType::ALL)),
    )
        .prop_map(|((sent, start, len, chain), category, gender, number, animacy, function, pronoun_type)| {
            MentionSeed {
                sent,
                start,
                len,
                chain,
                category,
                gender,
                number,
                animacy,
                function,
                pronoun_type,
            }
        })
}

/// Builds a valid document from raw seeds: spans are clamped into their
/// sentence and pronoun types dropped from non-pronouns.
fn build(id: String, genre: &str, sentences: Vec<Vec<String>>, seeds: Vec<MentionSeed>, heads: Vec<bool>) -> Document {
    let mut doc = Document::new(id, genre);
    doc.sentences = sentences;
    for (k, seed) in seeds.into_iter().enumerate() {
        let sent = seed.sent % doc.sentences.len();
        let len = doc.sentences[sent].len();
        let start = seed.start % len;
        let end = (start + seed.len).min(len);
        let mut m = Mention::new(format!("m{k}"), format!("c{}", seed.chain), Span::new(sent, start, end), seed.category)
            .with_attributes(seed.gender, seed.number, seed.animacy);
        m.function = seed.function;
        if seed.category == MentionCategory::Pronoun {
            m.pronoun_type = seed.pronoun_type;
        }
        doc.push_mention(m);
    }
    doc.canonicalize();
    for (chain, explicit) in doc.chains.iter_mut().zip(heads) {
        if explicit {
            chain.head_mention_id = chain.mention_ids.last().cloned();
        }
    }
    doc
}

pub fn sentences(max: usize) -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(prop::collection::vec(select(WORDS).prop_map(str::to_string), 1..14), 1..max)
}

/// A valid document with up to 7 sentences and 24 mentions.
pub fn document() -> impl Strategy<Value = Document> {
    (
        "[a-z]{1,6}",
        select(&["news", "ted"][..]),
        sentences(8),
        prop::collection::vec(mention_seed(), 0..24),
        prop::collection::vec(any::<bool>(), 5),
    )
        .prop_map(|(id, genre, sents, seeds, heads)| build(id, genre, sents, seeds, heads))
}

/// A document that may have no sentences at all.
pub fn maybe_empty_document() -> impl Strategy<Value = Document> {
    prop_oneof![
        1 => "[a-z]{1,4}".prop_map(|id| Document::new(id, "news")),
        9 => document(),
    ]
}
