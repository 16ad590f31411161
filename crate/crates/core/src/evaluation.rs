//! Corpus BLEU-4 and selection of the enriched test subset.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::enrichment::EnrichedSentence;
use crate::rational::Rational;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    #[default]
    None,
    /// Adds one to numerator and denominator of every order above unigrams.
    AddOne,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BleuError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("empty corpus")]
    EmptyCorpus,
}

/// Sufficient statistics of a corpus: clipped n-gram matches, hypothesis
/// n-gram totals and lengths. Sums over segments, so scoring is invariant
/// under corpus permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_length: u64,
    pub ref_length: u64,
}

impl core::ops::Add for BleuStats {
    type Output = BleuStats;

    fn add(mut self, rhs: BleuStats) -> BleuStats {
        for n in 0..MAX_ORDER {
            self.matches[n] += rhs.matches[n];
            self.totals[n] += rhs.totals[n];
        }
        self.hyp_length += rhs.hyp_length;
        self.ref_length += rhs.ref_length;
        self
    }
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> BTreeMap<Vec<&str>, u64> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            let key: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

/// Statistics of one hypothesis against its single reference.
pub fn segment_stats<S: AsRef<str>, T: AsRef<str>>(hypothesis: &[S], reference: &[T]) -> BleuStats {
    let mut stats = BleuStats {
        hyp_length: hypothesis.len() as u64,
        ref_length: reference.len() as u64,
        ..BleuStats::default()
    };
    for n in 1..=MAX_ORDER {
        let hyp = ngram_counts(hypothesis, n);
        let reference = ngram_counts(reference, n);
        stats.totals[n - 1] = hypothesis.len().saturating_sub(n - 1) as u64;
        stats.matches[n - 1] = hyp
            .iter()
            .map(|(gram, &count)| count.min(reference.get(gram).copied().unwrap_or(0)))
            .sum();
    }
    stats
}

#[derive(Debug, Clone, PartialEq)]
pub struct BleuScore {
    /// In `[0, 100]`.
    pub score: f64,
    pub stats: BleuStats,
    /// Precision per order after smoothing; `None` for orders with no
    /// hypothesis n-grams, which are left out of the geometric mean.
    pub ngram_precisions: [Option<Rational>; MAX_ORDER],
    pub brevity_penalty: f64,
}

impl BleuScore {
    pub fn hyp_length(&self) -> u64 {
        self.stats.hyp_length
    }

    pub fn ref_length(&self) -> u64 {
        self.stats.ref_length
    }
}

/// Scores accumulated statistics.
pub fn score_stats(stats: BleuStats, smoothing: Smoothing) -> BleuScore {
    let mut precisions = [None; MAX_ORDER];
    for (n, slot) in precisions.iter_mut().enumerate() {
        let (m, t) = (stats.matches[n], stats.totals[n]);
        if t == 0 {
            continue;
        }
        *slot = Some(match smoothing {
            Smoothing::AddOne if n > 0 => Rational::new(m + 1, t + 1),
            _ => Rational::new(m, t),
        });
    }

    let (c, r) = (stats.hyp_length, stats.ref_length);
    let brevity_penalty = if c == 0 {
        0.0
    } else if c > r {
        1.0
    } else {
        libm::exp(1.0 - r as f64 / c as f64)
    };

    let used: Vec<Rational> = precisions.iter().flatten().copied().collect();
    let score = if used.is_empty() || used.iter().any(|p| *p.numer() == 0) {
        0.0
    } else {
        let log_sum: f64 = used
            .iter()
            .map(|p| libm::log(*p.numer() as f64) - libm::log(*p.denom() as f64))
            .sum();
        100.0 * brevity_penalty * libm::exp(log_sum / used.len() as f64)
    };

    BleuScore {
        score,
        stats,
        ngram_precisions: precisions,
        brevity_penalty,
    }
}

/// Corpus-level BLEU-4 with a single reference per segment.
///
/// Orders for which the hypotheses contain no n-gram at all (very short
/// corpora) are left out of the geometric mean, so a corpus scored against
/// itself is always 100.
pub fn corpus_bleu<H, R, S, T>(hypotheses: &[H], references: &[R], smoothing: Smoothing) -> Result<BleuScore, BleuError>
where
    H: AsRef<[S]>,
    R: AsRef<[T]>,
    S: AsRef<str>,
    T: AsRef<str>,
{
    if hypotheses.len() != references.len() {
        return Err(BleuError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(BleuError::EmptyCorpus);
    }
    let stats = hypotheses
        .iter()
        .zip(references)
        .map(|(h, r)| segment_stats(h.as_ref(), r.as_ref()))
        .fold(BleuStats::default(), |acc, s| acc + s);
    Ok(score_stats(stats, smoothing))
}

/// Indices (in corpus order) of sentences that received at least one
/// insertion.
pub fn select_coref_subset(enriched: &[EnrichedSentence]) -> Vec<usize> {
    enriched
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.is_enriched().then_some(i))
        .collect()
}
