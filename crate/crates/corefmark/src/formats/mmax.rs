//! MMAX2 subset: a words file plus one coreference markable level.
//!
//! Words are `<word id="word_N">surface</word>` elements, in order.
//! Markables carry `span="word_A..word_B"` (or a single `word_A`) and the
//! attributes named in [`MmaxAttributes`]. Sentence boundaries come from a
//! sentence markable file when given, otherwise from a per-word sentence
//! attribute, otherwise the whole document is one sentence.

use std::collections::HashMap;
use std::io::BufRead;

use corefmark_core::model::{Animacy, Document, Gender, Mention, MentionCategory, NumberAttr, Span};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{FormatError, Result};

/// Attribute names looked up on markables and words. Editable because
/// exports differ in naming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmaxAttributes {
    pub coref_class: String,
    pub mention_type: String,
    pub cohesive_function: String,
    pub pronoun_type: String,
    pub gender: String,
    pub number: String,
    pub animacy: String,
    /// Word attribute holding a sentence number.
    pub word_sentence: String,
}

impl Default for MmaxAttributes {
    fn default() -> Self {
        MmaxAttributes {
            coref_class: "coref_class".into(),
            mention_type: "mention_type".into(),
            cohesive_function: "cohesive_function".into(),
            pronoun_type: "pronoun_type".into(),
            gender: "gender".into(),
            number: "number".into(),
            animacy: "animacy".into(),
            word_sentence: "sentence".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MmaxConfig {
    pub attributes: MmaxAttributes,
    pub genre: String,
}

struct Element {
    line: usize,
    attrs: HashMap<String, String>,
}

fn attributes(e: &BytesStart<'_>, line: usize) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| FormatError::at(line, format!("bad attribute: {err}")))?;
        let key = String::from_utf8_lossy(attr.key.local_name().as_ref()).into_owned();
        let value = attr
            .unescape_value()
            .map_err(|err| FormatError::at(line, format!("bad attribute value: {err}")))?;
        map.insert(key, value.into_owned());
    }
    Ok(map)
}

/// Collects every element named `name` with its attributes and text.
fn elements(text: &str, name: &[u8]) -> Result<Vec<(Element, String)>> {
    let line_of = |pos: u64| 1 + text.as_bytes()[..(pos as usize).min(text.len())].iter().filter(|&&b| b == b'\n').count();
    let mut reader = Reader::from_str(text);
    let mut out = Vec::new();
    let mut open: Option<(Element, String)> = None;
    loop {
        let pos = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| FormatError::at(line_of(reader.error_position()), format!("XML error: {e}")))?;
        let line = line_of(pos);
        match event {
            Event::Start(e) if e.local_name().as_ref() == name => {
                open = Some((
                    Element {
                        line,
                        attrs: attributes(&e, line)?,
                    },
                    String::new(),
                ));
            }
            Event::Empty(e) if e.local_name().as_ref() == name => {
                out.push((
                    Element {
                        line,
                        attrs: attributes(&e, line)?,
                    },
                    String::new(),
                ));
            }
            Event::Text(t) => {
                if let Some((_, text)) = open.as_mut() {
                    let s = t
                        .unescape()
                        .map_err(|e| FormatError::at(line, format!("bad text: {e}")))?;
                    text.push_str(&s);
                }
            }
            Event::CData(t) => {
                if let Some((_, text)) = open.as_mut() {
                    text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(e) if e.local_name().as_ref() == name => {
                if let Some(done) = open.take() {
                    out.push(done);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(out)
}

/// Resolves `word_A..word_B` or `word_A` to inclusive word positions.
fn resolve_span(span: &str, ids: &HashMap<String, usize>, at: usize) -> Result<(usize, usize)> {
    let span = span.trim();
    if span.is_empty() || span.contains(',') {
        return Err(FormatError::at(at, format!("malformed span {span:?}")));
    }
    let (a, b) = match span.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (span, span),
    };
    if a.is_empty() || b.is_empty() {
        return Err(FormatError::at(at, format!("malformed span {span:?}")));
    }
    let lookup = |id: &str| {
        ids.get(id)
            .copied()
            .ok_or_else(|| FormatError::at(at, format!("span references missing word id {id}")))
    };
    let (start, end) = (lookup(a)?, lookup(b)?);
    if start > end {
        return Err(FormatError::at(at, format!("malformed span {span:?}: end precedes start")));
    }
    Ok((start, end))
}

fn lookup_value<T: std::str::FromStr>(attrs: &HashMap<String, String>, key: &str) -> Option<T> {
    attrs.get(key).and_then(|v| v.parse().ok())
}

fn read_all<R: BufRead>(mut input: R) -> Result<String> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    if text.starts_with('\u{feff}') {
        text.drain(..'\u{feff}'.len_utf8());
    }
    Ok(text)
}

/// Parses one MMAX2 document. Line numbers in errors refer to the file
/// being read. Markables without a coreference class (missing, empty
/// or `empty`) are not coreference mentions and are skipped.
pub fn parse_mmax<W: BufRead, M: BufRead, S: BufRead>(
    doc_id: &str,
    words_file: W,
    markables_file: M,
    sentences_file: Option<S>,
    cfg: &MmaxConfig,
) -> Result<Document> {
    let names = &cfg.attributes;
    let words = elements(&read_all(words_file)?, b"word")?;
    let mut ids = HashMap::with_capacity(words.len());
    for (i, (w, _)) in words.iter().enumerate() {
        let id = w
            .attrs
            .get("id")
            .ok_or_else(|| FormatError::at(w.line, "word without id"))?;
        if ids.insert(id.clone(), i).is_some() {
            return Err(FormatError::at(w.line, format!("duplicate word id {id}")));
        }
    }

    // sentence number per word position
    let mut sent_of = vec![0usize; words.len()];
    if let Some(sentences) = sentences_file {
        let mut covered = vec![false; words.len()];
        let mut spans = Vec::new();
        for (m, _) in elements(&read_all(sentences)?, b"markable")? {
            let span = m
                .attrs
                .get("span")
                .ok_or_else(|| FormatError::at(m.line, "sentence markable without span"))?;
            spans.push(resolve_span(span, &ids, m.line)?);
        }
        spans.sort();
        for (n, (a, b)) in spans.into_iter().enumerate() {
            for p in a..=b {
                sent_of[p] = n;
                covered[p] = true;
            }
        }
        if let Some(p) = covered.iter().position(|c| !c) {
            return Err(FormatError::Invalid(format!(
                "word {} is not covered by any sentence markable",
                words[p].0.attrs["id"]
            )));
        }
    } else if words.iter().any(|(w, _)| w.attrs.contains_key(&names.word_sentence)) {
        let mut n = 0;
        let mut prev: Option<&str> = None;
        for (i, (w, _)) in words.iter().enumerate() {
            let label = w.attrs.get(&names.word_sentence).map(String::as_str);
            if prev.is_some() && label != prev {
                n += 1;
            }
            prev = label;
            sent_of[i] = n;
        }
    }

    let mut doc = Document::new(doc_id, cfg.genre.as_str());
    let mut offset_in_sentence = vec![0usize; words.len()];
    for (i, (_, surface)) in words.iter().enumerate() {
        let s = sent_of[i];
        if doc.sentences.len() <= s {
            doc.sentences.resize_with(s + 1, Vec::new);
        }
        offset_in_sentence[i] = doc.sentences[s].len();
        doc.sentences[s].push(surface.trim().to_string());
    }
    doc.sentences.retain(|s| !s.is_empty());

    for (m, _) in elements(&read_all(markables_file)?, b"markable")? {
        let chain = match m.attrs.get(&names.coref_class).map(|s| s.trim()) {
            None | Some("") | Some("empty") => continue,
            Some(c) => c.to_string(),
        };
        let id = m
            .attrs
            .get("id")
            .ok_or_else(|| FormatError::at(m.line, "markable without id"))?
            .clone();
        let span = m
            .attrs
            .get("span")
            .ok_or_else(|| FormatError::at(m.line, format!("markable {id} without span")))?;
        let (a, b) = resolve_span(span, &ids, m.line)?;
        if sent_of[a] != sent_of[b] {
            return Err(FormatError::at(m.line, format!("markable {id} crosses a sentence boundary")));
        }
        let category: MentionCategory = lookup_value(&m.attrs, &names.mention_type).unwrap_or(MentionCategory::NominalPhrase);
        let mut mention = Mention::new(
            id.clone(),
            chain,
            Span::new(sent_of[a], offset_in_sentence[a], offset_in_sentence[b] + 1),
            category,
        )
        .with_attributes(
            lookup_value(&m.attrs, &names.gender).unwrap_or(Gender::Unknown),
            lookup_value(&m.attrs, &names.number).unwrap_or(NumberAttr::Unknown),
            lookup_value(&m.attrs, &names.animacy).unwrap_or(Animacy::Unknown),
        );
        mention.function = lookup_value(&m.attrs, &names.cohesive_function);
        if category == MentionCategory::Pronoun {
            mention.pronoun_type = lookup_value(&m.attrs, &names.pronoun_type);
        }
        if doc.mentions.contains_key(&id) {
            return Err(FormatError::at(m.line, format!("duplicate markable id {id}")));
        }
        doc.push_mention(mention);
    }
    doc.canonicalize();
    Ok(doc)
}
