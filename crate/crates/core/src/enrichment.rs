//! Coreference markup for sentence-level training data.
//!
//! Three rules decide what goes inside a `<b_crf> … <e_crf>` block placed
//! immediately before a mention:
//!
//! 1. a pronoun (other than the excluded ones) receives the cleaned chain
//!    head;
//! 2. a nominal mention or proper name that is not the head receives the
//!    pronoun matching the head's gender, number and animacy;
//! 3. the head itself receives the pronoun matching its own attributes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::model::{
    chain_head, Animacy, Document, Gender, HeadPolicy, Mention, MentionCategory, NumberAttr, Span,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrichmentConfig {
    /// Longest cleaned head (in tokens) that may be inserted.
    pub max_head_tokens: usize,
    /// Lowercased pronoun surfaces never enriched.
    pub excluded_pronouns: BTreeSet<String>,
    pub article_set: BTreeSet<String>,
    pub genitive_markers: BTreeSet<String>,
    pub tag_open: String,
    pub tag_close: String,
    /// Chains with fewer mentions are left alone.
    pub min_chain_size: usize,
    pub head_policy: HeadPolicy,
}

fn set_of(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for EnrichmentConfig {
    fn default() -> Self {
        EnrichmentConfig {
            max_head_tokens: 3,
            excluded_pronouns: set_of(&["i"]),
            article_set: set_of(&["a", "an", "the"]),
            genitive_markers: set_of(&["'s", "\u{2019}s", "s'"]),
            tag_open: "<b_crf>".to_string(),
            tag_close: "<e_crf>".to_string(),
            min_chain_size: 2,
            head_policy: HeadPolicy::PreferExplicit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("max_head_tokens must be at least 1")]
    ZeroHeadTokens,
    #[error("min_chain_size must be at least 1")]
    ZeroChainSize,
    #[error("opening and closing tags must differ")]
    IdenticalTags,
    #[error("tags must be non-empty and contain no whitespace")]
    MalformedTag,
}

impl EnrichmentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_head_tokens == 0 {
            return Err(ConfigError::ZeroHeadTokens);
        }
        if self.min_chain_size == 0 {
            return Err(ConfigError::ZeroChainSize);
        }
        for tag in [&self.tag_open, &self.tag_close] {
            if tag.is_empty() || tag.chars().any(char::is_whitespace) {
                return Err(ConfigError::MalformedTag);
            }
        }
        if self.tag_open == self.tag_close {
            return Err(ConfigError::IdenticalTags);
        }
        Ok(())
    }

    fn is_tag(&self, token: &str) -> bool {
        token == self.tag_open || token == self.tag_close
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Heuristic {
    /// Pronoun enriched with the chain head.
    PronounWithHead = 1,
    /// Non-head nominal enriched with the head's pronoun.
    NominalWithGender = 2,
    /// Head enriched with its own pronoun.
    HeadWithPronoun = 3,
}

impl Heuristic {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Insertion {
    /// Index into the original sentence before which the block is placed.
    pub position: usize,
    /// Full block, tags included.
    pub tokens: Vec<String>,
    pub mention_id: String,
    pub heuristic: Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrichedSentence {
    pub doc_id: String,
    pub sent_index: usize,
    pub tokens: Vec<String>,
    /// Ordered by strictly increasing position.
    pub insertions: Vec<Insertion>,
}

impl EnrichedSentence {
    pub fn is_enriched(&self) -> bool {
        !self.insertions.is_empty()
    }

    /// Rebuilds the original tokens by dropping inserted runs.
    pub fn original_tokens(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.tokens.len());
        let mut cursor = 0;
        let mut shift = 0;
        for ins in &self.insertions {
            let at = ins.position + shift;
            out.extend_from_slice(&self.tokens[cursor..at]);
            shift += ins.tokens.len();
            cursor = at + ins.tokens.len();
        }
        out.extend_from_slice(&self.tokens[cursor..]);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnrichError {
    #[error("corpus contains reserved tag token {token:?} in document {doc_id} at {sent}:{tok}")]
    ReservedToken {
        doc_id: String,
        sent: usize,
        tok: usize,
        token: String,
    },
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
}

/// Drops articles and genitive clitics. `None` when nothing remains or the
/// result is longer than `cfg.max_head_tokens`.
pub fn clean_head<S: AsRef<str>>(head_tokens: &[S], cfg: &EnrichmentConfig) -> Option<Vec<String>> {
    let cleaned: Vec<String> = head_tokens
        .iter()
        .map(AsRef::as_ref)
        .filter(|t| {
            let lower = t.to_lowercase();
            !cfg.article_set.contains(&lower) && !cfg.genitive_markers.contains(&lower)
        })
        .map(ToString::to_string)
        .collect();
    if cleaned.is_empty() || cleaned.len() > cfg.max_head_tokens {
        None
    } else {
        Some(cleaned)
    }
}

/// English third-person pronoun for a set of attributes, or `None` when the
/// choice would be a guess.
pub fn select_pronoun(gender: Gender, number: NumberAttr, animacy: Animacy) -> Option<&'static str> {
    if number == NumberAttr::Plural {
        return Some("they");
    }
    match (gender, animacy) {
        (Gender::Female, _) => Some("she"),
        (Gender::Male, _) => Some("he"),
        (Gender::Neutral, _) | (Gender::Unknown, Animacy::Inanimate) => Some("it"),
        (Gender::Unknown, _) => None,
    }
}

/// A non-head nominal whose own gender disagrees with its head's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenderConflict {
    pub doc_id: String,
    pub mention_id: String,
    pub head_id: String,
    pub mention_gender: Gender,
    pub head_gender: Gender,
}

struct ChainInfo<'d> {
    size: usize,
    head: Option<&'d Mention>,
}

fn chain_index<'d>(doc: &'d Document, policy: HeadPolicy) -> BTreeMap<&'d str, ChainInfo<'d>> {
    doc.chains
        .iter()
        .map(|c| {
            (
                c.id.as_str(),
                ChainInfo {
                    size: c.len(),
                    head: chain_head(c, doc, policy),
                },
            )
        })
        .collect()
}

fn wrap(cfg: &EnrichmentConfig, content: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut block = Vec::with_capacity(cfg.max_head_tokens + 2);
    block.push(cfg.tag_open.clone());
    block.extend(content);
    block.push(cfg.tag_close.clone());
    block
}

fn candidate(
    doc: &Document,
    mention: &Mention,
    info: &ChainInfo<'_>,
    cfg: &EnrichmentConfig,
) -> Option<(Heuristic, Vec<String>)> {
    if info.size < cfg.min_chain_size {
        return None;
    }
    let head = info.head?;
    let is_head = head.id == mention.id;
    match mention.category {
        MentionCategory::Pronoun => {
            if is_head || !head.category.is_nominal() {
                return None;
            }
            let surface = doc.surface(mention).join(" ").to_lowercase();
            if cfg.excluded_pronouns.contains(&surface) {
                return None;
            }
            let cleaned = clean_head(doc.surface(head), cfg)?;
            Some((Heuristic::PronounWithHead, wrap(cfg, cleaned)))
        }
        c if c.is_nominal() => {
            let pronoun = select_pronoun(head.gender, head.number, head.animacy)?;
            let heuristic = if is_head {
                Heuristic::HeadWithPronoun
            } else {
                Heuristic::NominalWithGender
            };
            Some((heuristic, wrap(cfg, [pronoun.to_string()])))
        }
        _ => None,
    }
}

fn check_reserved(doc: &Document, cfg: &EnrichmentConfig) -> Result<(), EnrichError> {
    match doc.tokens().find(|t| cfg.is_tag(t.surface)) {
        Some(t) => Err(EnrichError::ReservedToken {
            doc_id: doc.id.clone(),
            sent: t.sent_index,
            tok: t.tok_index,
            token: t.surface.to_string(),
        }),
        None => Ok(()),
    }
}

/// Enriches every sentence of a validated document.
///
/// Mentions are visited per sentence in document order (earlier start
/// first, longer span first on ties). A mention overlapping one that was
/// already enriched is skipped.
pub fn enrich_document(doc: &Document, cfg: &EnrichmentConfig) -> Result<Vec<EnrichedSentence>, EnrichError> {
    cfg.validate()?;
    check_reserved(doc, cfg)?;
    let chains = chain_index(doc, cfg.head_policy);

    let mut by_sentence: Vec<Vec<&Mention>> = alloc::vec![Vec::new(); doc.sentences.len()];
    for m in doc.mentions.values() {
        if let Some(slot) = by_sentence.get_mut(m.span.sent) {
            slot.push(m);
        }
    }

    let mut out = Vec::with_capacity(doc.sentences.len());
    for (sent_index, (tokens, mut mentions)) in doc.sentences.iter().zip(by_sentence).enumerate() {
        mentions.sort_by(|a, b| a.span.cmp(&b.span).then_with(|| a.id.cmp(&b.id)));
        let mut taken: Vec<Span> = Vec::new();
        let mut insertions: Vec<Insertion> = Vec::new();
        for m in mentions {
            if taken.iter().any(|s| s.overlaps(&m.span)) {
                continue;
            }
            let Some(info) = chains.get(m.chain_id.as_str()) else {
                continue;
            };
            if let Some((heuristic, block)) = candidate(doc, m, info, cfg) {
                taken.push(m.span);
                insertions.push(Insertion {
                    position: m.span.start,
                    tokens: block,
                    mention_id: m.id.clone(),
                    heuristic,
                });
            }
        }
        out.push(EnrichedSentence {
            doc_id: doc.id.clone(),
            sent_index,
            tokens: splice(tokens, &insertions),
            insertions,
        });
    }
    Ok(out)
}

fn splice(tokens: &[String], insertions: &[Insertion]) -> Vec<String> {
    let extra: usize = insertions.iter().map(|i| i.tokens.len()).sum();
    let mut out = Vec::with_capacity(tokens.len() + extra);
    let mut cursor = 0;
    for ins in insertions {
        out.extend_from_slice(&tokens[cursor..ins.position]);
        out.extend(ins.tokens.iter().cloned());
        cursor = ins.position;
    }
    out.extend_from_slice(&tokens[cursor..]);
    out
}

/// Non-head nominals whose own known gender differs from the head's.
pub fn gender_conflicts(doc: &Document, cfg: &EnrichmentConfig) -> Vec<GenderConflict> {
    let chains = chain_index(doc, cfg.head_policy);
    doc.mentions
        .values()
        .filter(|m| m.category.is_nominal() && m.gender != Gender::Unknown)
        .filter_map(|m| {
            let head = chains.get(m.chain_id.as_str())?.head?;
            (head.id != m.id && head.gender != Gender::Unknown && head.gender != m.gender).then(|| {
                GenderConflict {
                    doc_id: doc.id.clone(),
                    mention_id: m.id.clone(),
                    head_id: head.id.clone(),
                    mention_gender: m.gender,
                    head_gender: head.gender,
                }
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StripError {
    #[error("unbalanced tag {tag:?} at token {position}")]
    Unbalanced { position: usize, tag: String },
    #[error("nested tag {tag:?} at token {position}")]
    Nested { position: usize, tag: String },
}

impl StripError {
    pub fn position(&self) -> usize {
        match self {
            StripError::Unbalanced { position, .. } | StripError::Nested { position, .. } => *position,
        }
    }
}

/// Removes every `tag_open … tag_close` run, tags included.
pub fn strip_tags<S: AsRef<str>>(line: &[S], cfg: &EnrichmentConfig) -> Result<Vec<String>, StripError> {
    let mut out = Vec::with_capacity(line.len());
    let mut open_at: Option<usize> = None;
    for (position, tok) in line.iter().enumerate() {
        let tok = tok.as_ref();
        if tok == cfg.tag_open {
            if open_at.is_some() {
                return Err(StripError::Nested {
                    position,
                    tag: tok.to_string(),
                });
            }
            open_at = Some(position);
        } else if tok == cfg.tag_close {
            if open_at.take().is_none() {
                return Err(StripError::Unbalanced {
                    position,
                    tag: tok.to_string(),
                });
            }
        } else if open_at.is_none() {
            out.push(tok.to_string());
        }
    }
    match open_at {
        Some(position) => Err(StripError::Unbalanced {
            position,
            tag: cfg.tag_open.clone(),
        }),
        None => Ok(out),
    }
}
