//! CoNLL-2012 style coreference columns.
//!
//! Rows are whitespace separated; a blank line ends a sentence and
//! `#begin document` / `#end document` delimit documents. The coreference
//! column holds `-` or `|`-joined markers `(id`, `id)` and `(id)`.
//!
//! The writer emits six columns: document, part, token index, word, POS
//! and coreference. POS is `PRP`, `PRP$` or `WP` on single-token pronoun
//! mentions and `-` elsewhere.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use corefmark_core::model::{natural_cmp, Document, Mention, MentionCategory, PronounType, Span};

use crate::error::{FormatError, Result};
use crate::strip_bom;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllConfig {
    pub word_col: usize,
    /// `None` disables pronoun detection.
    pub pos_col: Option<usize>,
    /// `None` means the last column.
    pub coref_col: Option<usize>,
    pub pronoun_tags: BTreeSet<String>,
    pub genre: String,
}

impl Default for ConllConfig {
    fn default() -> Self {
        ConllConfig {
            word_col: 3,
            pos_col: Some(4),
            coref_col: None,
            pronoun_tags: ["PRP", "PRP$", "WP", "WP$"].iter().map(|s| s.to_string()).collect(),
            genre: String::new(),
        }
    }
}

fn pronoun_type_for_tag(tag: &str) -> Option<PronounType> {
    match tag {
        "PRP" => Some(PronounType::Personal),
        "PRP$" => Some(PronounType::Possessive),
        "WP" | "WP$" => Some(PronounType::Relative),
        _ => None,
    }
}

fn tag_for_pronoun(pt: Option<PronounType>) -> &'static str {
    match pt {
        Some(PronounType::Possessive) => "PRP$",
        Some(PronounType::Relative) => "WP",
        _ => "PRP",
    }
}

/// Splits `(name); part 000` into an id. Part 0 keeps the bare name; other
/// parts become `name:NNN`.
fn doc_id_from_header(rest: &str) -> String {
    let rest = rest.trim();
    if let Some((name, part)) = rest.split_once(';') {
        let name = name.trim().trim_start_matches('(').trim_end_matches(')');
        let part = part.trim().trim_start_matches("part").trim();
        if part.chars().all(|c| c.is_ascii_digit()) && part.trim_start_matches('0').is_empty() {
            return name.to_string();
        }
        return format!("{name}:{part}");
    }
    rest.trim_start_matches('(').trim_end_matches(')').to_string()
}

fn header_parts(id: &str) -> (&str, &str) {
    match id.rsplit_once(':') {
        Some((name, part)) if !part.is_empty() && part.chars().all(|c| c.is_ascii_digit()) => (name, part),
        _ => (id, "000"),
    }
}

#[derive(Default)]
struct DocBuilder {
    doc: Document,
    sentence: Vec<String>,
    /// POS of each token of the current sentence.
    pos: Vec<Option<String>>,
    /// Open brackets per chain id: (start token, line).
    open: BTreeMap<String, (usize, usize)>,
    /// (chain id, span, pos of first token when single-token).
    pending: Vec<(String, Span, Option<String>)>,
}

impl DocBuilder {
    fn new(id: String, genre: &str) -> Self {
        DocBuilder {
            doc: Document::new(id, genre),
            ..DocBuilder::default()
        }
    }

    fn end_sentence(&mut self, line: usize) -> Result<()> {
        if let Some((chain, (_, opened))) = self.open.iter().next() {
            return Err(FormatError::at(
                line,
                format!("unclosed mention of chain {chain} opened at line {opened}"),
            ));
        }
        if !self.sentence.is_empty() {
            self.doc.sentences.push(std::mem::take(&mut self.sentence));
            self.pos.clear();
        }
        Ok(())
    }

    fn row(&mut self, cols: &[&str], cfg: &ConllConfig, line: usize) -> Result<()> {
        let coref_col = cfg.coref_col.unwrap_or(cols.len() - 1);
        let need = cfg.word_col.max(coref_col) + 1;
        if cols.len() < need {
            return Err(FormatError::at(line, format!("expected at least {need} columns, found {}", cols.len())));
        }
        let sent = self.doc.sentences.len();
        let tok = self.sentence.len();
        self.sentence.push(cols[cfg.word_col].to_string());
        let pos = cfg.pos_col.and_then(|c| cols.get(c)).map(|s| s.to_string());
        self.pos.push(pos.clone());

        let field = cols[coref_col];
        if field == "-" || field == "_" {
            return Ok(());
        }
        for marker in field.split('|') {
            let opens = marker.starts_with('(');
            let closes = marker.ends_with(')');
            let id = marker.trim_start_matches('(').trim_end_matches(')');
            if id.is_empty() || id.contains(['(', ')']) {
                return Err(FormatError::at(line, format!("malformed coreference marker {marker:?}")));
            }
            match (opens, closes) {
                (true, true) => self.pending.push((id.to_string(), Span::new(sent, tok, tok + 1), pos.clone())),
                (true, false) => {
                    if self.open.insert(id.to_string(), (tok, line)).is_some() {
                        return Err(FormatError::at(line, format!("overlapping mentions of chain {id}")));
                    }
                }
                (false, true) => {
                    let (start, _) = self
                        .open
                        .remove(id)
                        .ok_or_else(|| FormatError::at(line, format!("unmatched close of chain {id}")))?;
                    self.pending.push((id.to_string(), Span::new(sent, start, tok + 1), None));
                }
                (false, false) => {
                    return Err(FormatError::at(line, format!("malformed coreference marker {marker:?}")));
                }
            }
        }
        Ok(())
    }

    fn finish(mut self, cfg: &ConllConfig, line: usize) -> Result<Document> {
        self.end_sentence(line)?;
        let mut pending = self.pending;
        pending.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| natural_cmp(&a.0, &b.0)));
        for (k, (chain, span, pos)) in pending.into_iter().enumerate() {
            let pronoun_tag = pos.filter(|p| cfg.pronoun_tags.contains(p));
            let category = if pronoun_tag.is_some() {
                MentionCategory::Pronoun
            } else {
                MentionCategory::NominalPhrase
            };
            let mut mention = Mention::new(format!("m{k}"), chain, span, category);
            mention.pronoun_type = pronoun_tag.as_deref().and_then(pronoun_type_for_tag);
            self.doc.push_mention(mention);
        }
        self.doc.canonicalize();
        Ok(self.doc)
    }
}

/// Parses every document of a CoNLL stream.
pub fn parse_conll<R: BufRead>(input: R, cfg: &ConllConfig) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut current: Option<DocBuilder> = None;
    let mut last_line = 0;
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = line?;
        let text = if i == 0 { strip_bom(&line) } else { &line };
        let text = text.trim_end();
        if let Some(rest) = text.strip_prefix("#begin document") {
            if let Some(open) = current.take() {
                docs.push(open.finish(cfg, line_no)?);
            }
            current = Some(DocBuilder::new(doc_id_from_header(rest), &cfg.genre));
        } else if text.starts_with("#end document") {
            let open = current
                .take()
                .ok_or_else(|| FormatError::at(line_no, "#end document without #begin document"))?;
            docs.push(open.finish(cfg, line_no)?);
        } else if text.starts_with('#') {
            continue;
        } else if text.trim().is_empty() {
            if let Some(b) = current.as_mut() {
                b.end_sentence(line_no)?;
            }
        } else {
            let builder =
                current.get_or_insert_with(|| DocBuilder::new(format!("doc{}", docs.len()), &cfg.genre));
            let cols: Vec<&str> = text.split_whitespace().collect();
            builder.row(&cols, cfg, line_no)?;
        }
    }
    if let Some(open) = current {
        docs.push(open.finish(cfg, last_line)?);
    }
    Ok(docs)
}

/// Coreference field of every token of one sentence.
fn coref_fields(doc: &Document, sent: usize, len: usize) -> Vec<String> {
    let mut opens: Vec<Vec<&Mention>> = vec![Vec::new(); len];
    let mut singles: Vec<Vec<&Mention>> = vec![Vec::new(); len];
    let mut closes: Vec<Vec<&Mention>> = vec![Vec::new(); len];
    for m in doc.mentions.values().filter(|m| m.span.sent == sent && m.span.end <= len && !m.span.is_empty()) {
        if m.span.len() == 1 {
            singles[m.span.start].push(m);
        } else {
            opens[m.span.start].push(m);
            closes[m.span.end - 1].push(m);
        }
    }
    (0..len)
        .map(|t| {
            opens[t].sort_by(|a, b| b.span.end.cmp(&a.span.end).then_with(|| natural_cmp(&a.chain_id, &b.chain_id)));
            singles[t].sort_by(|a, b| natural_cmp(&a.chain_id, &b.chain_id));
            closes[t].sort_by(|a, b| b.span.start.cmp(&a.span.start).then_with(|| natural_cmp(&a.chain_id, &b.chain_id)));
            let markers: Vec<String> = opens[t]
                .iter()
                .map(|m| format!("({}", m.chain_id))
                .chain(singles[t].iter().map(|m| format!("({})", m.chain_id)))
                .chain(closes[t].iter().map(|m| format!("{})", m.chain_id)))
                .collect();
            if markers.is_empty() {
                "-".to_string()
            } else {
                markers.join("|")
            }
        })
        .collect()
}

/// Emits documents in the canonical six-column layout read by
/// [`parse_conll`] with the default configuration.
pub fn write_conll<W: Write>(mut out: W, docs: &[Document]) -> Result<()> {
    let mut buf = String::new();
    for doc in docs {
        let (name, part) = header_parts(&doc.id);
        buf.push_str(&format!("#begin document ({name}); part {part}\n"));
        for (s, sentence) in doc.sentences.iter().enumerate() {
            let fields = coref_fields(doc, s, sentence.len());
            let mut pos = vec!["-"; sentence.len()];
            for m in doc.mentions.values() {
                if m.span.sent == s && m.span.len() == 1 && m.category == MentionCategory::Pronoun {
                    if let Some(p) = pos.get_mut(m.span.start) {
                        *p = tag_for_pronoun(m.pronoun_type);
                    }
                }
            }
            for (t, word) in sentence.iter().enumerate() {
                buf.push_str(&format!("{name}\t{}\t{t}\t{word}\t{}\t{}\n", part.parse::<u32>().unwrap_or(0), pos[t], fields[t]));
            }
            buf.push('\n');
        }
        buf.push_str("#end document\n");
        out.write_all(buf.as_bytes())?;
        buf.clear();
    }
    Ok(())
}
