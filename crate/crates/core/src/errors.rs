//! Mention-level error typology and aggregate error reports.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::model::{normalize_label, CohesiveFunction, Document, MentionCategory};
use crate::rational::{ratio_or_zero, render_half_up, render_percent, Rational};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorCategory {
    Gender,
    Number,
    Case,
    Ambiguous,
    WrongNamedEntity,
    WrongWord,
    MissingWord,
    WrongSyntacticStructure,
    SpellingError,
    AddresseeReference,
    /// Annotator-defined category; the label is never empty.
    Other(String),
}

impl ErrorCategory {
    pub const NAMED: [ErrorCategory; 10] = [
        ErrorCategory::Gender,
        ErrorCategory::Number,
        ErrorCategory::Case,
        ErrorCategory::Ambiguous,
        ErrorCategory::WrongNamedEntity,
        ErrorCategory::WrongWord,
        ErrorCategory::MissingWord,
        ErrorCategory::WrongSyntacticStructure,
        ErrorCategory::SpellingError,
        ErrorCategory::AddresseeReference,
    ];

    /// Parses a category label. Unknown labels become [`ErrorCategory::Other`];
    /// blank labels yield `None`.
    pub fn parse(label: &str) -> Option<ErrorCategory> {
        let key = normalize_label(label);
        if key.is_empty() {
            return None;
        }
        let named = ErrorCategory::NAMED.iter().find(|c| c.as_str() == key);
        Some(match named {
            Some(c) => c.clone(),
            None if key == "other" => ErrorCategory::Other("other".to_string()),
            None => ErrorCategory::Other(label.trim().to_string()),
        })
    }

    pub fn as_str(&self) -> &str {
        match self {
            ErrorCategory::Gender => "gender",
            ErrorCategory::Number => "number",
            ErrorCategory::Case => "case",
            ErrorCategory::Ambiguous => "ambiguous",
            ErrorCategory::WrongNamedEntity => "wrong_named_entity",
            ErrorCategory::WrongWord => "wrong_word",
            ErrorCategory::MissingWord => "missing_word",
            ErrorCategory::WrongSyntacticStructure => "wrong_syntactic_structure",
            ErrorCategory::SpellingError => "spelling_error",
            ErrorCategory::AddresseeReference => "addressee_reference",
            ErrorCategory::Other(label) => label,
        }
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One correctness judgment on a mention of a system's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorRecord {
    pub doc_id: String,
    pub system: String,
    pub mention_id: String,
    pub correct: bool,
    /// Present exactly when `correct` is false.
    pub category: Option<ErrorCategory>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("mention {mention_id} not found in document {doc_id} of system {system}")]
    UnresolvedMention {
        system: String,
        doc_id: String,
        mention_id: String,
    },
    #[error("mention {mention_id} in document {doc_id} judged more than once")]
    DuplicateJudgment { doc_id: String, mention_id: String },
    #[error("erroneous mention {mention_id} in document {doc_id} has no category")]
    MissingCategory { doc_id: String, mention_id: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorReport {
    pub system: String,
    pub genre: String,
    pub total_mentions: u64,
    pub total_errors: u64,
    pub per_category: BTreeMap<ErrorCategory, u64>,
    pub antecedent_errors: u64,
    pub anaphor_errors: u64,
    pub np_errors: u64,
    pub pronoun_errors: u64,
    /// Errors on verb-phrase and clause mentions, outside the NP/pronoun split.
    pub other_type_errors: u64,
}

/// A two-way split rendered at two decimals. The second value is the
/// complement of the first so a row always sums to exactly 1.00.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRendering {
    pub first: String,
    pub second: String,
}

fn render_split(first: u64, second: u64) -> Option<SplitRendering> {
    let total = first + second;
    if total == 0 {
        return None;
    }
    let hundredths = (2 * 100 * first + total) / (2 * total);
    let fmt = |h: u64| alloc::format!("{}.{:02}", h / 100, h % 100);
    Some(SplitRendering {
        first: fmt(hundredths),
        second: fmt(100 - hundredths),
    })
}

impl ErrorReport {
    pub fn rate(&self) -> Rational {
        ratio_or_zero(self.total_errors, self.total_mentions)
    }

    /// Error rate as a percentage with one decimal, e.g. `9.6%`.
    pub fn rate_percent(&self) -> String {
        render_percent(self.rate(), 1)
    }

    /// `117 (9.6%)`
    pub fn count_with_rate(&self) -> String {
        alloc::format!("{} ({})", self.total_errors, self.rate_percent())
    }

    pub fn antecedent_fraction(&self) -> Option<Rational> {
        let total = self.antecedent_errors + self.anaphor_errors;
        (total > 0).then(|| Rational::new(self.antecedent_errors, total))
    }

    pub fn anaphor_fraction(&self) -> Option<Rational> {
        self.antecedent_fraction().map(|f| Rational::from_integer(1) - f)
    }

    pub fn np_fraction(&self) -> Option<Rational> {
        let total = self.np_errors + self.pronoun_errors;
        (total > 0).then(|| Rational::new(self.np_errors, total))
    }

    pub fn pronoun_fraction(&self) -> Option<Rational> {
        self.np_fraction().map(|f| Rational::from_integer(1) - f)
    }

    /// Antecedent / anaphor split at two decimals.
    pub fn antecedent_anaphor(&self) -> Option<SplitRendering> {
        render_split(self.antecedent_errors, self.anaphor_errors)
    }

    /// Noun phrase / pronoun split at two decimals.
    pub fn np_pronoun(&self) -> Option<SplitRendering> {
        render_split(self.np_errors, self.pronoun_errors)
    }

    /// Rows for a per-category chart, in category order.
    pub fn category_breakdown(&self) -> Vec<BreakdownRow> {
        self.per_category
            .iter()
            .map(|(category, &count)| BreakdownRow {
                category: category.clone(),
                system: self.system.clone(),
                genre: self.genre.clone(),
                count,
                fraction: render_half_up(ratio_or_zero(count, self.total_errors), 2),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakdownRow {
    pub category: ErrorCategory,
    pub system: String,
    pub genre: String,
    pub count: u64,
    pub fraction: String,
}

/// Aggregates the judgments of one system over its output documents of one
/// genre.
///
/// Records for other systems, or for documents not in `docs`, are ignored.
/// `total_mentions` is the number of annotated mentions in `docs`. A mention
/// without a cohesive function counts as antecedent when it opens its chain
/// and as anaphor otherwise.
pub fn build_report(
    system: &str,
    genre: &str,
    records: &[ErrorRecord],
    docs: &[Document],
) -> Result<ErrorReport, ReportError> {
    let by_id: BTreeMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut report = ErrorReport {
        system: system.to_string(),
        genre: genre.to_string(),
        total_mentions: docs.iter().map(|d| d.mentions.len() as u64).sum(),
        total_errors: 0,
        per_category: BTreeMap::new(),
        antecedent_errors: 0,
        anaphor_errors: 0,
        np_errors: 0,
        pronoun_errors: 0,
        other_type_errors: 0,
    };
    let mut seen: BTreeSet<(&str, &str)> = BTreeSet::new();
    for rec in records.iter().filter(|r| r.system == system) {
        let Some(doc) = by_id.get(rec.doc_id.as_str()) else {
            continue;
        };
        let Some(mention) = doc.mention(&rec.mention_id) else {
            return Err(ReportError::UnresolvedMention {
                system: system.to_string(),
                doc_id: rec.doc_id.clone(),
                mention_id: rec.mention_id.clone(),
            });
        };
        if !seen.insert((rec.doc_id.as_str(), rec.mention_id.as_str())) {
            return Err(ReportError::DuplicateJudgment {
                doc_id: rec.doc_id.clone(),
                mention_id: rec.mention_id.clone(),
            });
        }
        if rec.correct {
            continue;
        }
        let Some(category) = &rec.category else {
            return Err(ReportError::MissingCategory {
                doc_id: rec.doc_id.clone(),
                mention_id: rec.mention_id.clone(),
            });
        };
        report.total_errors += 1;
        *report.per_category.entry(category.clone()).or_insert(0) += 1;

        let is_antecedent = match mention.function {
            Some(f) => f == CohesiveFunction::Antecedent,
            None => doc
                .chain(&mention.chain_id)
                .and_then(|c| c.mention_ids.first())
                .is_some_and(|first| *first == mention.id),
        };
        if is_antecedent {
            report.antecedent_errors += 1;
        } else {
            report.anaphor_errors += 1;
        }
        match mention.category {
            MentionCategory::Pronoun => report.pronoun_errors += 1,
            MentionCategory::NominalPhrase | MentionCategory::ProperName => report.np_errors += 1,
            MentionCategory::VerbPhrase | MentionCategory::Clause => report.other_type_errors += 1,
        }
    }
    Ok(report)
}
