//! TSV and JSON emitters for statistics, error and evaluation reports.
//!
//! Exact ratios are rendered half-up: one decimal for chain lengths, error
//! rates and BLEU, two decimals for fractions.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use corefmark_core::errors::{BreakdownRow, ErrorReport};
use corefmark_core::rational::{render_half_up, to_f64};
use corefmark_core::stats::ChainStats;
use serde_json::{json, Value};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Tsv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format: {other}")),
        }
    }
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn write<W: Write>(&self, mut out: W, format: ReportFormat) -> Result<()> {
        match format {
            ReportFormat::Tsv => {
                let mut text = self.header.join("\t");
                text.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|v| match v {
                            Value::String(s) => s.clone(),
                            Value::Null => String::new(),
                            other => other.to_string(),
                        })
                        .collect();
                    let _ = writeln!(text, "{}", cells.join("\t"));
                }
                out.write_all(text.as_bytes())?;
            }
            ReportFormat::Json => {
                let objects: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(self.header.iter().map(|h| h.to_string()).zip(row.iter().cloned()).collect())
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut out, &objects).map_err(std::io::Error::from)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub corpus: String,
    pub genre: String,
    pub stats: ChainStats,
}

pub fn write_stats<W: Write>(out: W, rows: &[StatsRow], format: ReportFormat) -> Result<()> {
    let table = Table {
        header: &["corpus", "genre", "tokens", "mentions", "chains", "avg_len", "max_len", "aggregation"],
        rows: rows
            .iter()
            .map(|r| {
                let s = &r.stats;
                let (avg, max) = match format {
                    ReportFormat::Tsv => (
                        json!(render_half_up(s.avg_chain_length, 1)),
                        json!(render_half_up(s.max_chain_length, 1)),
                    ),
                    ReportFormat::Json => (json!(to_f64(s.avg_chain_length)), json!(to_f64(s.max_chain_length))),
                };
                vec![
                    json!(r.corpus),
                    json!(r.genre),
                    json!(s.tokens),
                    json!(s.mentions),
                    json!(s.chains),
                    avg,
                    max,
                    json!(s.scope.as_str()),
                ]
            })
            .collect(),
    };
    table.write(out, format)
}

fn split_cells(split: Option<corefmark_core::errors::SplitRendering>) -> (Value, Value) {
    match split {
        Some(s) => (json!(s.first), json!(s.second)),
        None => (Value::Null, Value::Null),
    }
}

pub fn write_error_reports<W: Write>(out: W, reports: &[ErrorReport], format: ReportFormat) -> Result<()> {
    let table = Table {
        header: &[
            "system",
            "genre",
            "mentions",
            "errors",
            "rate",
            "antecedent",
            "anaphor",
            "np",
            "pronoun",
            "other_type",
        ],
        rows: reports
            .iter()
            .map(|r| {
                let (ante, ana) = split_cells(r.antecedent_anaphor());
                let (np, pron) = split_cells(r.np_pronoun());
                vec![
                    json!(r.system),
                    json!(r.genre),
                    json!(r.total_mentions),
                    json!(r.total_errors),
                    json!(r.rate_percent()),
                    ante,
                    ana,
                    np,
                    pron,
                    json!(r.other_type_errors),
                ]
            })
            .collect(),
    };
    table.write(out, format)
}

pub fn write_breakdown<W: Write>(out: W, rows: &[BreakdownRow], format: ReportFormat) -> Result<()> {
    let table = Table {
        header: &["category", "system", "genre", "count", "fraction"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    json!(r.category.as_str()),
                    json!(r.system),
                    json!(r.genre),
                    json!(r.count),
                    json!(r.fraction),
                ]
            })
            .collect(),
    };
    table.write(out, format)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub system: String,
    pub genre: String,
    /// `all` or `coref`.
    pub slice: String,
    pub bleu: f64,
    /// Externally computed METEOR, passed through verbatim.
    pub meteor: Option<String>,
}

pub fn format_bleu(score: f64, decimals: usize) -> String {
    format!("{score:.decimals$}")
}

pub fn write_eval<W: Write>(out: W, rows: &[EvalRow], format: ReportFormat, decimals: usize) -> Result<()> {
    let table = Table {
        header: &["system", "genre", "slice", "bleu", "meteor"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    json!(r.system),
                    json!(r.genre),
                    json!(r.slice),
                    json!(format_bleu(r.bleu, decimals)),
                    r.meteor.as_ref().map_or(Value::Null, |m| json!(m)),
                ]
            })
            .collect(),
    };
    table.write(out, format)
}
