//! Coreference-chain tooling for sentence-level machine translation data.
//!
//! This crate holds the pure algorithms: the document model, chain-based
//! enrichment with `<b_crf> … <e_crf>` blocks, chain statistics, error
//! typology aggregation and corpus BLEU. It needs only `alloc`; file formats
//! and the command line live in the `corefmark` crate.
#![no_std]

extern crate alloc;

pub mod evaluation;
pub mod enrichment;
pub mod errors;
pub mod model;
pub mod rational;
pub mod stats;

pub use enrichment::{
    clean_head, enrich_document, select_pronoun, strip_tags, EnrichedSentence, EnrichmentConfig, Heuristic,
    Insertion,
};
pub use model::{
    chain_head, lint_document, validate_document, Animacy, Chain, CohesiveFunction, Document, Gender,
    HeadPolicy, Mention, MentionCategory, NumberAttr, PronounType, Span, Violation,
};
