//! One JSON document per line.
//!
//! ```json
//! {"id":"d1","genre":"news","sentences":[["The","salt","."]],
//!  "mentions":[{"id":"m1","chain_id":"c1","sent":0,"start":0,"end":2,
//!               "category":"nominal_phrase","gender":"neutral",
//!               "number":"singular","animacy":"inanimate"}],
//!  "chains":[{"id":"c1","mentions":["m1"]}]}
//! ```
//!
//! `function`, `pronoun_type` and a chain's `head` are optional. Spans are
//! half-open token offsets within sentence `sent`.

use std::io::{BufRead, Write};
use std::str::FromStr;

use corefmark_core::model::{Chain, Document, Mention, Span};
use serde::{Deserialize, Serialize};

use crate::error::{FormatError, Result};
use crate::strip_bom;

const REQUIRED: [&str; 5] = ["id", "genre", "sentences", "mentions", "chains"];

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    id: String,
    genre: String,
    sentences: Vec<Vec<String>>,
    mentions: Vec<JsonMention>,
    chains: Vec<JsonChain>,
}

#[derive(Serialize, Deserialize)]
struct JsonMention {
    id: String,
    chain_id: String,
    sent: usize,
    start: usize,
    end: usize,
    category: String,
    gender: String,
    number: String,
    animacy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pronoun_type: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonChain {
    id: String,
    mentions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    head: Option<String>,
}

impl From<&Document> for JsonDocument {
    fn from(doc: &Document) -> Self {
        let mut chains: Vec<&Chain> = doc.chains.iter().collect();
        chains.sort_by(|a, b| corefmark_core::model::natural_cmp(&a.id, &b.id));
        JsonDocument {
            id: doc.id.clone(),
            genre: doc.genre.clone(),
            sentences: doc.sentences.clone(),
            mentions: doc
                .mentions
                .values()
                .map(|m| JsonMention {
                    id: m.id.clone(),
                    chain_id: m.chain_id.clone(),
                    sent: m.span.sent,
                    start: m.span.start,
                    end: m.span.end,
                    category: m.category.to_string(),
                    gender: m.gender.to_string(),
                    number: m.number.to_string(),
                    animacy: m.animacy.to_string(),
                    function: m.function.map(|f| f.to_string()),
                    pronoun_type: m.pronoun_type.map(|p| p.to_string()),
                })
                .collect(),
            chains: chains
                .into_iter()
                .map(|c| JsonChain {
                    id: c.id.clone(),
                    mentions: c.mention_ids.clone(),
                    head: c.head_mention_id.clone(),
                })
                .collect(),
        }
    }
}

fn vocab<T: FromStr>(value: &str, field: &str, index: usize, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| FormatError::at(line, format!("mentions[{index}].{field}: {e}")))
}

impl JsonDocument {
    fn into_document(self, line: usize) -> Result<Document> {
        let mut doc = Document::new(self.id, self.genre);
        doc.sentences = self.sentences;
        for (i, m) in self.mentions.into_iter().enumerate() {
            let mention = Mention {
                span: Span::new(m.sent, m.start, m.end),
                category: vocab(&m.category, "category", i, line)?,
                gender: vocab(&m.gender, "gender", i, line)?,
                number: vocab(&m.number, "number", i, line)?,
                animacy: vocab(&m.animacy, "animacy", i, line)?,
                function: m.function.as_deref().map(|f| vocab(f, "function", i, line)).transpose()?,
                pronoun_type: m
                    .pronoun_type
                    .as_deref()
                    .map(|p| vocab(p, "pronoun_type", i, line))
                    .transpose()?,
                id: m.id,
                chain_id: m.chain_id,
            };
            if doc.mentions.insert(mention.id.clone(), mention).is_some() {
                return Err(FormatError::at(line, format!("mentions[{i}]: duplicate mention id")));
            }
        }
        doc.chains = self
            .chains
            .into_iter()
            .map(|c| Chain {
                id: c.id,
                mention_ids: c.mentions,
                head_mention_id: c.head,
            })
            .collect();
        Ok(doc)
    }
}

/// Serializes one document as a single JSON line (without the newline).
pub fn to_line(doc: &Document) -> String {
    serde_json::to_string(&JsonDocument::from(doc)).expect("document serialization is infallible")
}

/// Parses one line. `line` is the 1-based line number used in errors.
pub fn from_line(text: &str, line: usize) -> Result<Document> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::at(line, format!("invalid JSON: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| FormatError::at(line, "expected a JSON object"))?;
    if let Some(missing) = REQUIRED.iter().find(|f| !object.contains_key(**f)) {
        return Err(FormatError::at(line, format!("missing field: {missing}")));
    }
    let json: JsonDocument =
        serde_json::from_value(value).map_err(|e| FormatError::at(line, format!("schema violation: {e}")))?;
    json.into_document(line)
}

pub fn write_jsonl<W: Write>(mut out: W, docs: &[Document]) -> Result<()> {
    for doc in docs {
        out.write_all(to_line(doc).as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Streams documents from a JSON-lines source. Blank lines are skipped.
pub struct JsonlReader<R> {
    input: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> JsonlReader<R> {
    pub fn new(input: R) -> Self {
        JsonlReader {
            input,
            line: 0,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for JsonlReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line += 1;
            let text = if self.line == 1 { strip_bom(&self.buf) } else { &self.buf };
            let text = text.trim_end_matches(['\n', '\r']);
            if text.trim().is_empty() {
                continue;
            }
            return Some(from_line(text, self.line));
        }
    }
}

pub fn parse_jsonl<R: BufRead>(input: R) -> Result<Vec<Document>> {
    JsonlReader::new(input).collect()
}
