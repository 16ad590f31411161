//! Document, mention and chain types plus the closed attribute vocabularies.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

/// Error returned when a label is not part of a closed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {vocabulary} value: {value}")]
pub struct UnknownLabel {
    pub vocabulary: &'static str,
    pub value: String,
}

macro_rules! vocabulary {
    (
        $(#[$meta:meta])*
        $name:ident, $label:literal {
            $($(#[$vmeta:meta])* $variant:ident => $text:literal $(| $alias:literal)*),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($(#[$vmeta])* $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownLabel;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let key = normalize_label(s);
                match key.as_str() {
                    $($text $(| $alias)* => Ok($name::$variant),)+
                    _ => Err(UnknownLabel {
                        vocabulary: $label,
                        value: String::from(s),
                    }),
                }
            }
        }
    };
}

/// Lowercases a label and folds spaces and hyphens to underscores.
pub(crate) fn normalize_label(s: &str) -> String {
    s.trim()
        .chars()
        .map(|c| match c {
            ' ' | '-' => '_',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

vocabulary! {
    /// Grammatical gender as reported by the automatic annotator.
    #[derive(Default)]
    Gender, "gender" {
        Male => "male" | "masculine" | "m",
        Female => "female" | "feminine" | "f",
        Neutral => "neutral" | "neuter" | "n",
        #[default]
        Unknown => "unknown",
    }
}

vocabulary! {
    #[derive(Default)]
    NumberAttr, "number" {
        Singular => "singular" | "sg",
        Plural => "plural" | "pl",
        #[default]
        Unknown => "unknown",
    }
}

vocabulary! {
    #[derive(Default)]
    Animacy, "animacy" {
        Animate => "animate",
        Inanimate => "inanimate",
        #[default]
        Unknown => "unknown",
    }
}

vocabulary! {
    /// Mention type. `ProperName` is kept apart from `NominalPhrase` even
    /// though enrichment treats both as nominal.
    MentionCategory, "mention category" {
        Pronoun => "pronoun" | "pron" | "pronominal",
        NominalPhrase => "nominal_phrase" | "np" | "nominal" | "noun_phrase",
        ProperName => "proper_name" | "proper" | "name" | "ne",
        VerbPhrase => "verb_phrase" | "vp",
        Clause => "clause",
    }
}

vocabulary! {
    CohesiveFunction, "cohesive function" {
        Antecedent => "antecedent",
        Anaphoric => "anaphoric" | "anaphor",
        Cataphoric => "cataphoric" | "cataphor",
        Comparative => "comparative",
        Substitution => "substitution",
        Ellipsis => "ellipsis",
        Apposition => "apposition",
    }
}

vocabulary! {
    PronounType, "pronoun type" {
        Personal => "personal",
        Possessive => "possessive",
        Demonstrative => "demonstrative",
        Reflexive => "reflexive",
        Relative => "relative",
    }
}

impl MentionCategory {
    /// Nominal phrases and proper names.
    pub fn is_nominal(self) -> bool {
        matches!(self, MentionCategory::NominalPhrase | MentionCategory::ProperName)
    }
}

/// A borrowed view of one token with its document coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub surface: &'a str,
    pub sent_index: usize,
    pub tok_index: usize,
}

/// Half-open token interval `[start, end)` inside one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub sent: usize,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(sent: usize, start: usize, end: usize) -> Self {
        Span { sent, start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.sent == other.sent && self.start < other.end && other.start < self.end
    }
}

impl PartialOrd for Span {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Document order: sentence, then start, then longer spans first.
impl Ord for Span {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sent
            .cmp(&other.sent)
            .then(self.start.cmp(&other.start))
            .then(other.end.cmp(&self.end))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub id: String,
    pub chain_id: String,
    pub span: Span,
    pub category: MentionCategory,
    pub gender: Gender,
    pub number: NumberAttr,
    pub animacy: Animacy,
    pub function: Option<CohesiveFunction>,
    pub pronoun_type: Option<PronounType>,
}

impl Mention {
    /// A mention with unknown attributes and no function or pronoun type.
    pub fn new(
        id: impl Into<String>,
        chain_id: impl Into<String>,
        span: Span,
        category: MentionCategory,
    ) -> Self {
        Mention {
            id: id.into(),
            chain_id: chain_id.into(),
            span,
            category,
            gender: Gender::Unknown,
            number: NumberAttr::Unknown,
            animacy: Animacy::Unknown,
            function: None,
            pronoun_type: None,
        }
    }

    pub fn with_attributes(mut self, gender: Gender, number: NumberAttr, animacy: Animacy) -> Self {
        self.gender = gender;
        self.number = number;
        self.animacy = animacy;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub id: String,
    /// Mention ids in document order.
    pub mention_ids: Vec<String>,
    /// Head given by the input data, if any.
    pub head_mention_id: Option<String>,
}

impl Chain {
    pub fn new(id: impl Into<String>, mention_ids: Vec<String>) -> Self {
        Chain {
            id: id.into(),
            mention_ids,
            head_mention_id: None,
        }
    }

    pub fn len(&self) -> usize {
        self.mention_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mention_ids.is_empty()
    }
}

/// How [`chain_head`] picks the head of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadPolicy {
    /// Use the head carried by the input data and fall back to the
    /// computed head when there is none.
    #[default]
    PreferExplicit,
    /// Ignore explicit heads and always compute one.
    Computed,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub id: String,
    pub genre: String,
    pub sentences: Vec<Vec<String>>,
    pub chains: Vec<Chain>,
    pub mentions: BTreeMap<String, Mention>,
}

impl Document {
    pub fn new(id: impl Into<String>, genre: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            genre: genre.into(),
            ..Document::default()
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = Token<'_>> {
        self.sentences.iter().enumerate().flat_map(|(sent_index, sent)| {
            sent.iter().enumerate().map(move |(tok_index, surface)| Token {
                surface,
                sent_index,
                tok_index,
            })
        })
    }

    pub fn mention(&self, id: &str) -> Option<&Mention> {
        self.mentions.get(id)
    }

    pub fn chain(&self, id: &str) -> Option<&Chain> {
        self.chains.iter().find(|c| c.id == id)
    }

    /// Surface tokens covered by a mention. Out-of-range spans yield an
    /// empty slice.
    pub fn surface(&self, mention: &Mention) -> &[String] {
        let span = mention.span;
        self.sentences
            .get(span.sent)
            .and_then(|s| s.get(span.start..span.end))
            .unwrap_or(&[])
    }

    /// Adds a mention and appends it to its chain, creating the chain when
    /// needed. Call [`Document::canonicalize`] afterwards to restore order.
    pub fn push_mention(&mut self, mention: Mention) {
        match self.chains.iter_mut().find(|c| c.id == mention.chain_id) {
            Some(chain) => chain.mention_ids.push(mention.id.clone()),
            None => self
                .chains
                .push(Chain::new(mention.chain_id.clone(), alloc::vec![mention.id.clone()])),
        }
        self.mentions.insert(mention.id.clone(), mention);
    }

    /// Sorts chain members into document order and chains by id.
    pub fn canonicalize(&mut self) {
        let mentions = &self.mentions;
        for chain in &mut self.chains {
            chain.mention_ids.sort_by(|a, b| {
                let key = |id: &String| mentions.get(id).map(|m| m.span);
                key(a).cmp(&key(b)).then_with(|| a.cmp(b))
            });
        }
        self.chains.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    }
}

/// Orders identifiers so that `"2" < "10"` and `"set_2" < "set_10"`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, &str) {
        let stem = s.trim_end_matches(|c: char| c.is_ascii_digit());
        (stem, s[stem.len()..].trim_start_matches('0'))
    }
    let (stem_a, num_a) = split(a);
    let (stem_b, num_b) = split(b);
    stem_a
        .cmp(stem_b)
        .then(num_a.len().cmp(&num_b.len()))
        .then(num_a.cmp(num_b))
        .then_with(|| a.cmp(b))
}

/// Returns the head mention of a chain.
///
/// An explicit head is used when present (and `policy` allows it).
/// Otherwise the head is the first nominal phrase or proper name in
/// document order, falling back to the first mention. `None` only when the
/// chain is empty or references mentions missing from `doc`.
pub fn chain_head<'d>(chain: &Chain, doc: &'d Document, policy: HeadPolicy) -> Option<&'d Mention> {
    if policy == HeadPolicy::PreferExplicit {
        if let Some(head) = chain.head_mention_id.as_deref().and_then(|id| doc.mention(id)) {
            return Some(head);
        }
    }
    let mut members = chain.mention_ids.iter().filter_map(|id| doc.mention(id));
    let first = members.next()?;
    if first.category.is_nominal() {
        return Some(first);
    }
    Some(members.find(|m| m.category.is_nominal()).unwrap_or(first))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    EmptyToken,
    WhitespaceInToken,
    SentenceOutOfRange,
    EmptySpan,
    SpanOutOfRange,
    UnknownChain,
    ChainMismatch,
    OrphanMention,
    DuplicateMention,
    MissingMention,
    EmptyChain,
    DuplicateChain,
    ChainOrder,
    HeadNotInChain,
    PronounTypeOnNonPronoun,
    SingletonChain,
}

impl Rule {
    pub fn description(self) -> &'static str {
        match self {
            Rule::EmptyToken => "empty token",
            Rule::WhitespaceInToken => "token contains whitespace",
            Rule::SentenceOutOfRange => "sentence index out of range",
            Rule::EmptySpan => "empty span",
            Rule::SpanOutOfRange => "span exceeds sentence length",
            Rule::UnknownChain => "mention refers to unknown chain",
            Rule::ChainMismatch => "mention listed in a chain other than its own",
            Rule::OrphanMention => "mention belongs to no chain",
            Rule::DuplicateMention => "mention listed more than once",
            Rule::MissingMention => "chain references missing mention",
            Rule::EmptyChain => "chain has no mentions",
            Rule::DuplicateChain => "duplicate chain id",
            Rule::ChainOrder => "chain mentions not in document order",
            Rule::HeadNotInChain => "head mention not in chain",
            Rule::PronounTypeOnNonPronoun => "pronoun type on non-pronoun mention",
            Rule::SingletonChain => "singleton chain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    /// Id of the offending mention, chain, or `sent:tok` token coordinate.
    pub subject: String,
    pub severity: Severity,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.rule.description())
    }
}

/// Checks every document invariant. Returns an empty list iff the document
/// is well formed. Warnings such as singleton chains are not reported here;
/// see [`lint_document`].
pub fn validate_document(doc: &Document) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut error = |rule: Rule, subject: String| {
        out.push(Violation {
            rule,
            subject,
            severity: Severity::Error,
        })
    };

    for tok in doc.tokens() {
        if tok.surface.is_empty() {
            error(Rule::EmptyToken, format!("{}:{}", tok.sent_index, tok.tok_index));
        } else if tok.surface.chars().any(char::is_whitespace) {
            error(Rule::WhitespaceInToken, format!("{}:{}", tok.sent_index, tok.tok_index));
        }
    }

    let chain_ids: BTreeSet<&str> = doc.chains.iter().map(|c| c.id.as_str()).collect();
    for (key, m) in &doc.mentions {
        if key != &m.id {
            error(Rule::DuplicateMention, m.id.clone());
        }
        match doc.sentences.get(m.span.sent) {
            None => error(Rule::SentenceOutOfRange, m.id.clone()),
            Some(sent) => {
                if m.span.is_empty() {
                    error(Rule::EmptySpan, m.id.clone());
                } else if m.span.end > sent.len() {
                    error(Rule::SpanOutOfRange, m.id.clone());
                }
            }
        }
        if !chain_ids.contains(m.chain_id.as_str()) {
            error(Rule::UnknownChain, m.id.clone());
        }
        if m.pronoun_type.is_some() && m.category != MentionCategory::Pronoun {
            error(Rule::PronounTypeOnNonPronoun, m.id.clone());
        }
    }

    let mut seen_chains = BTreeSet::new();
    let mut listed: BTreeSet<&str> = BTreeSet::new();
    for chain in &doc.chains {
        if !seen_chains.insert(chain.id.as_str()) {
            error(Rule::DuplicateChain, chain.id.clone());
        }
        if chain.mention_ids.is_empty() {
            error(Rule::EmptyChain, chain.id.clone());
        }
        let mut prev: Option<Span> = None;
        let mut ordered = true;
        for id in &chain.mention_ids {
            if !listed.insert(id.as_str()) {
                error(Rule::DuplicateMention, id.clone());
            }
            match doc.mentions.get(id) {
                None => error(Rule::MissingMention, id.clone()),
                Some(m) => {
                    if m.chain_id != chain.id {
                        error(Rule::ChainMismatch, id.clone());
                    }
                    let key = (m.span.sent, m.span.start);
                    if prev.is_some_and(|p| (p.sent, p.start) > key) {
                        ordered = false;
                    }
                    prev = Some(m.span);
                }
            }
        }
        if !ordered {
            error(Rule::ChainOrder, chain.id.clone());
        }
        if let Some(head) = &chain.head_mention_id {
            if !chain.mention_ids.contains(head) {
                error(Rule::HeadNotInChain, head.clone());
            }
        }
    }
    for id in doc.mentions.keys() {
        if !listed.contains(id.as_str()) {
            error(Rule::OrphanMention, id.clone());
        }
    }
    out
}

/// Non-fatal observations: currently singleton chains.
pub fn lint_document(doc: &Document) -> Vec<Violation> {
    doc.chains
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| Violation {
            rule: Rule::SingletonChain,
            subject: c.id.clone(),
            severity: Severity::Warning,
        })
        .collect()
}
