//! Chain-feature profile: tokens, mentions, chains, mean and maximum chain
//! length, per document and aggregated over a corpus.

use crate::model::Document;
use crate::rational::{ratio_or_zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    PerDocument,
    CorpusMicro,
    CorpusMacro,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::PerDocument => "document",
            Scope::CorpusMicro => "micro",
            Scope::CorpusMacro => "macro",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Ratio of corpus totals; maximum over all chains.
    Micro,
    /// Mean of per-document values.
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainStats {
    pub tokens: u64,
    pub mentions: u64,
    pub chains: u64,
    pub avg_chain_length: Rational,
    pub max_chain_length: Rational,
    pub scope: Scope,
}

/// Counts for one document. Only chains with at least `min_chain_size`
/// mentions contribute to `chains`, `mentions`, mean and maximum.
pub fn document_stats(doc: &Document, min_chain_size: usize) -> ChainStats {
    let min = min_chain_size.max(1);
    let (mut mentions, mut chains, mut max) = (0u64, 0u64, 0u64);
    for size in doc.chains.iter().map(|c| c.len()).filter(|&n| n >= min) {
        let size = size as u64;
        mentions += size;
        chains += 1;
        max = max.max(size);
    }
    ChainStats {
        tokens: doc.token_count() as u64,
        mentions,
        chains,
        avg_chain_length: ratio_or_zero(mentions, chains),
        max_chain_length: Rational::from_integer(max),
        scope: Scope::PerDocument,
    }
}

/// Aggregates over a corpus. Returns `None` for an empty corpus.
///
/// Counts are summed in both modes. Under [`Aggregation::Macro`] the mean
/// and maximum chain lengths are averaged over the documents that contain
/// at least one counted chain.
pub fn corpus_stats<'a, I>(docs: I, min_chain_size: usize, aggregation: Aggregation) -> Option<ChainStats>
where
    I: IntoIterator<Item = &'a Document>,
{
    let per_doc = docs.into_iter().map(|d| document_stats(d, min_chain_size));
    aggregate(per_doc, aggregation)
}

/// Folds already computed per-document statistics.
pub fn aggregate<I>(per_doc: I, aggregation: Aggregation) -> Option<ChainStats>
where
    I: IntoIterator<Item = ChainStats>,
{
    let mut any = false;
    let (mut tokens, mut mentions, mut chains) = (0u64, 0u64, 0u64);
    let mut global_max = Rational::from_integer(0);
    let mut avg_sum = Rational::from_integer(0);
    let mut max_sum = Rational::from_integer(0);
    let mut with_chains = 0u64;
    for s in per_doc {
        any = true;
        tokens += s.tokens;
        mentions += s.mentions;
        chains += s.chains;
        global_max = global_max.max(s.max_chain_length);
        if s.chains > 0 {
            with_chains += 1;
            avg_sum += s.avg_chain_length;
            max_sum += s.max_chain_length;
        }
    }
    if !any {
        return None;
    }
    let (avg, max, scope) = match aggregation {
        Aggregation::Micro => (ratio_or_zero(mentions, chains), global_max, Scope::CorpusMicro),
        Aggregation::Macro if with_chains == 0 => {
            (Rational::from_integer(0), Rational::from_integer(0), Scope::CorpusMacro)
        }
        Aggregation::Macro => {
            let n = Rational::from_integer(with_chains);
            (avg_sum / n, max_sum / n, Scope::CorpusMacro)
        }
    };
    Some(ChainStats {
        tokens,
        mentions,
        chains,
        avg_chain_length: avg,
        max_chain_length: max,
        scope,
    })
}
