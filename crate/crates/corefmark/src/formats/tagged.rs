//! Space-tokenized training lines with inline `<b_crf> … <e_crf>` blocks,
//! plus an optional line index (`doc_id<TAB>sent_index`).

use std::io::{BufRead, Write};

use corefmark_core::EnrichedSentence;

use crate::error::Result;
use crate::strip_bom;

/// Appends one sentence as a line, tokens joined by single spaces.
pub fn push_line(buf: &mut String, tokens: &[String]) {
    let mut first = true;
    for t in tokens {
        if !first {
            buf.push(' ');
        }
        buf.push_str(t);
        first = false;
    }
    buf.push('\n');
}

pub fn push_index_line(buf: &mut String, sentence: &EnrichedSentence) {
    buf.push_str(&sentence.doc_id);
    buf.push('\t');
    buf.push_str(&sentence.sent_index.to_string());
    buf.push('\n');
}

/// Writes one line per sentence, and a matching index line when `index`
/// is given.
pub fn write_tagged_text<W: Write>(
    mut out: W,
    enriched: &[EnrichedSentence],
    index: Option<&mut dyn Write>,
) -> Result<()> {
    let mut text = String::new();
    for s in enriched {
        push_line(&mut text, &s.tokens);
    }
    out.write_all(text.as_bytes())?;
    if let Some(index) = index {
        let mut idx = String::new();
        for s in enriched {
            push_index_line(&mut idx, s);
        }
        index.write_all(idx.as_bytes())?;
    }
    Ok(())
}

/// Reads tagged lines back as token lists. A leading BOM is dropped.
pub fn read_tagged_lines<R: BufRead>(input: R) -> impl Iterator<Item = Result<Vec<String>>> {
    input.lines().enumerate().map(|(i, line)| {
        let line = line?;
        let line = if i == 0 { strip_bom(&line) } else { &line };
        Ok(line.split_whitespace().map(str::to_string).collect())
    })
}
