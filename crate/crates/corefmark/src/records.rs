//! Tab-separated error judgments.
//!
//! The header names the columns `doc_id`, `system`, `mention_id`,
//! `correct`, `category` and optionally `note`; column order is free.

use std::io::BufRead;

use corefmark_core::errors::{ErrorCategory, ErrorRecord};

use crate::error::{FormatError, Result};
use crate::strip_bom;

const COLUMNS: [&str; 5] = ["doc_id", "system", "mention_id", "correct", "category"];

fn parse_bool(value: &str, line: usize) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" | "correct" => Ok(true),
        "false" | "0" | "no" | "n" | "incorrect" => Ok(false),
        other => Err(FormatError::at(line, format!("correct: expected true or false, found {other:?}"))),
    }
}

pub fn load_error_records<R: BufRead>(input: R) -> Result<Vec<ErrorRecord>> {
    let mut lines = input.lines().enumerate();
    let header = loop {
        match lines.next() {
            None => return Ok(Vec::new()),
            Some((i, line)) => {
                let line = line?;
                let line = if i == 0 { strip_bom(&line).to_string() } else { line };
                if !line.trim().is_empty() {
                    break line;
                }
            }
        }
    };
    let names: Vec<&str> = header.split('\t').map(str::trim).collect();
    let mut index = [0usize; 5];
    for (slot, column) in index.iter_mut().zip(COLUMNS) {
        *slot = names
            .iter()
            .position(|n| *n == column)
            .ok_or_else(|| FormatError::at(1, format!("missing column: {column}")))?;
    }
    let note_col = names.iter().position(|n| *n == "note");

    let mut records = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let cell = |c: usize| cells.get(c).map(|s| s.trim()).unwrap_or("");
        for (c, column) in index.iter().zip(COLUMNS).take(4) {
            if cell(*c).is_empty() {
                return Err(FormatError::at(line_no, format!("empty {column}")));
            }
        }
        let correct = parse_bool(cell(index[3]), line_no)?;
        let category = ErrorCategory::parse(cell(index[4]));
        if !correct && category.is_none() {
            return Err(FormatError::at(line_no, "incorrect mention without error category"));
        }
        records.push(ErrorRecord {
            doc_id: cell(index[0]).to_string(),
            system: cell(index[1]).to_string(),
            mention_id: cell(index[2]).to_string(),
            correct,
            category: if correct { None } else { category },
            note: note_col.map(cell).filter(|s| !s.is_empty()).map(str::to_string),
        });
    }
    Ok(records)
}
