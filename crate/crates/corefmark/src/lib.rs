//! File formats, reports and the command-line front end for
//! [`corefmark_core`].
//!
//! Supported encodings: CoNLL-2012 coreference columns, a subset of MMAX2
//! (words plus one coreference markable level), a JSON-lines document
//! schema, and tagged plain text for training.

pub mod cli;
pub mod error;
pub mod formats;
pub mod records;
pub mod report;

pub use error::{FormatError, Result};

/// Version of the JSON-lines document schema.
pub const SCHEMA_VERSION: u32 = 1;

/// Strips a leading UTF-8 byte order mark.
pub(crate) fn strip_bom(line: &str) -> &str {
    line.strip_prefix('\u{feff}').unwrap_or(line)
}
