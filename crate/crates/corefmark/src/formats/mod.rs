pub mod conll;
pub mod jsonl;
pub mod mmax;
pub mod tagged;

use std::fmt;
use std::str::FromStr;

use corefmark_core::Document;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Conll,
    Mmax,
    Jsonl,
    TaggedText,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Conll => "conll",
            Format::Mmax => "mmax",
            Format::Jsonl => "jsonl",
            Format::TaggedText => "tagged_text",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conll" => Ok(Format::Conll),
            "mmax" => Ok(Format::Mmax),
            "jsonl" => Ok(Format::Jsonl),
            "tagged_text" | "tagged" => Ok(Format::TaggedText),
            other => Err(format!("unknown format: {other}")),
        }
    }
}

/// Documents loaded from one file.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFile {
    pub path: String,
    pub format: Format,
    pub documents: Vec<Document>,
}

impl CorpusFile {
    /// Ids that occur more than once, in first-seen order.
    pub fn duplicate_ids(&self) -> Vec<&str> {
        let mut seen = std::collections::HashSet::new();
        let mut dups = Vec::new();
        for d in &self.documents {
            if !seen.insert(d.id.as_str()) && !dups.contains(&d.id.as_str()) {
                dups.push(d.id.as_str());
            }
        }
        dups
    }
}
