//! `corefmark` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse error, 3 data
//! invariant violation. Every failure prints one line to stderr and
//! nothing to stdout; file outputs are written to a temporary file and
//! renamed into place only on success.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use corefmark_core::enrichment::{gender_conflicts, EnrichError};
use corefmark_core::errors::{build_report, ErrorReport};
use corefmark_core::evaluation::{corpus_bleu, Smoothing};
use corefmark_core::stats::{aggregate, document_stats, Aggregation, ChainStats};
use corefmark_core::{enrich_document, strip_tags, validate_document, Document, EnrichmentConfig, HeadPolicy};
use rayon::prelude::*;
use tempfile::NamedTempFile;

use crate::error::FormatError;
use crate::formats::conll::{parse_conll, write_conll, ConllConfig};
use crate::formats::jsonl::{self, parse_jsonl, write_jsonl, JsonlReader};
use crate::formats::mmax::{parse_mmax, MmaxConfig};
use crate::formats::tagged::{push_index_line, push_line, read_tagged_lines};
use crate::records::load_error_records;
use crate::report::{self, EvalRow, ReportFormat, StatsRow};

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (document schema 1)");

/// Documents handed to the worker pool at a time.
const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Parse = 2,
    Invariant = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: ExitCode::Usage,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        CliError {
            code: ExitCode::Parse,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        CliError {
            code: ExitCode::Invariant,
            message: message.into(),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(e) => CliError::usage(format!("I/O error: {e}")),
            other => CliError::parse(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::usage(format!("I/O error: {e}"))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "corefmark", version = VERSION, about = "Coreference-chain enrichment and analysis for MT corpora")]
pub struct Cli {
    /// Worker threads (0 = all cores). Output does not depend on this.
    #[arg(long, global = true, env = "COREFMARK_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert annotations between CoNLL, MMAX2 and JSON lines.
    Convert(ConvertArgs),
    /// Insert coreference tag blocks and write tagged training text.
    Enrich(EnrichArgs),
    /// Remove tag blocks from tagged text.
    Strip(StripArgs),
    /// Chain statistics per corpus and genre.
    Stats(StatsArgs),
    /// Aggregate mention-level error judgments.
    Errors(ErrorsArgs),
    /// Evaluation metrics.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Line indices of sentences that receive at least one tag block.
    Subset(SubsetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Conll,
    Mmax,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Conll,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub from: InputFormat,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub to: OutputFormat,
    /// Input file (CoNLL or JSON lines).
    #[arg(long, conflicts_with_all = ["words", "markables", "sentences"])]
    pub input: Option<PathBuf>,
    /// MMAX2 words file.
    #[arg(long, requires = "markables")]
    pub words: Option<PathBuf>,
    /// MMAX2 coreference markables file.
    #[arg(long, requires = "words")]
    pub markables: Option<PathBuf>,
    /// MMAX2 sentence markables file.
    #[arg(long, requires = "words")]
    pub sentences: Option<PathBuf>,
    /// Document id for MMAX2 input (defaults to the words file stem).
    #[arg(long)]
    pub doc_id: Option<String>,
    #[arg(long, default_value = "")]
    pub genre: String,
    #[command(flatten)]
    pub conll: ConllArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConllArgs {
    /// 0-based word column.
    #[arg(long, default_value_t = 3)]
    pub word_col: usize,
    /// 0-based POS column used to detect pronouns.
    #[arg(long, default_value_t = 4)]
    pub pos_col: usize,
    /// 0-based coreference column (default: last).
    #[arg(long)]
    pub coref_col: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeadChoice {
    /// Use heads from the data when present.
    Explicit,
    /// Always compute the head.
    Computed,
}

#[derive(Debug, Args)]
pub struct EnrichmentArgs {
    #[arg(long, default_value_t = 3)]
    pub max_head_tokens: usize,
    /// Pronoun never enriched (repeatable; replaces the default "i").
    #[arg(long = "exclude-pronoun")]
    pub excluded_pronouns: Vec<String>,
    /// Article removed from heads (repeatable; replaces the defaults).
    #[arg(long = "article")]
    pub articles: Vec<String>,
    /// Genitive marker removed from heads (repeatable; replaces the defaults).
    #[arg(long = "genitive")]
    pub genitives: Vec<String>,
    #[arg(long, default_value = "<b_crf>")]
    pub tag_open: String,
    #[arg(long, default_value = "<e_crf>")]
    pub tag_close: String,
    #[arg(long, default_value_t = 2)]
    pub min_chain_size: usize,
    #[arg(long, value_enum, default_value = "explicit")]
    pub head_policy: HeadChoice,
    /// Report nominals whose gender disagrees with their head on stderr.
    #[arg(long)]
    pub log_conflicts: bool,
}

impl EnrichmentArgs {
    fn config(&self) -> CliResult<EnrichmentConfig> {
        let mut cfg = EnrichmentConfig {
            max_head_tokens: self.max_head_tokens,
            tag_open: self.tag_open.clone(),
            tag_close: self.tag_close.clone(),
            min_chain_size: self.min_chain_size,
            head_policy: match self.head_policy {
                HeadChoice::Explicit => HeadPolicy::PreferExplicit,
                HeadChoice::Computed => HeadPolicy::Computed,
            },
            ..EnrichmentConfig::default()
        };
        let lower = |v: &[String]| v.iter().map(|s| s.to_lowercase()).collect::<BTreeSet<_>>();
        if !self.excluded_pronouns.is_empty() {
            cfg.excluded_pronouns = lower(&self.excluded_pronouns);
        }
        if !self.articles.is_empty() {
            cfg.article_set = lower(&self.articles);
        }
        if !self.genitives.is_empty() {
            cfg.genitive_markers = lower(&self.genitives);
        }
        cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EnrichArgs {
    /// JSON-lines documents.
    #[arg(long)]
    pub docs: PathBuf,
    /// Tagged text output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Line index output: doc_id and sentence index per line.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[command(flatten)]
    pub enrichment: EnrichmentArgs,
}

#[derive(Debug, Args)]
pub struct StripArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "<b_crf>")]
    pub tag_open: String,
    #[arg(long, default_value = "<e_crf>")]
    pub tag_close: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationChoice {
    Micro,
    Macro,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    Tsv,
    Json,
}

impl From<FormatChoice> for ReportFormat {
    fn from(f: FormatChoice) -> Self {
        match f {
            FormatChoice::Tsv => ReportFormat::Tsv,
            FormatChoice::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// JSON-lines documents (repeatable; one corpus per file).
    #[arg(long, required = true)]
    pub docs: Vec<PathBuf>,
    /// Corpus label per --docs file (default: file stem).
    #[arg(long)]
    pub corpus: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub min_chain_size: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub aggregation: AggregationChoice,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: FormatChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ErrorsArgs {
    /// Judgment TSV.
    #[arg(long)]
    pub records: PathBuf,
    /// System output documents as SYSTEM=PATH (repeatable).
    #[arg(long = "docs", required = true, value_parser = parse_system_docs)]
    pub docs: Vec<(String, PathBuf)>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: FormatChoice,
    /// Per-category rows (category, system, genre, count, fraction).
    #[arg(long)]
    pub breakdown: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_system_docs(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((system, path)) if !system.is_empty() && !path.is_empty() => {
            Ok((system.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected SYSTEM=PATH, found {s:?}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Corpus BLEU-4 against a single reference.
    Bleu(BleuArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothingChoice {
    None,
    AddOne,
}

#[derive(Debug, Args)]
pub struct BleuArgs {
    /// Hypotheses, one pre-tokenized segment per line.
    #[arg(long)]
    pub hyp: PathBuf,
    /// References, one pre-tokenized segment per line.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// 0-based line indices restricting scoring to a subset.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "none")]
    pub smoothing: SmoothingChoice,
    #[arg(long, default_value_t = 1)]
    pub decimals: usize,
    /// Print a report table (all slice, plus coref slice with --subset).
    #[arg(long)]
    pub report: bool,
    #[arg(long, default_value = "", requires = "report")]
    pub system: String,
    #[arg(long, default_value = "", requires = "report")]
    pub genre: String,
    /// Externally computed METEOR for the full set.
    #[arg(long, requires = "report")]
    pub meteor: Option<String>,
    /// Externally computed METEOR for the subset.
    #[arg(long, requires_all = ["report", "subset"])]
    pub meteor_coref: Option<String>,
    #[arg(long, value_enum, default_value = "tsv", requires = "report")]
    pub format: FormatChoice,
}

#[derive(Debug, Args)]
pub struct SubsetArgs {
    #[arg(long)]
    pub docs: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub enrichment: EnrichmentArgs,
}

/// Where a command writes its primary output.
enum Sink {
    File {
        writer: BufWriter<NamedTempFile>,
        path: PathBuf,
    },
    Stdout(Vec<u8>),
}

impl Sink {
    fn open(path: Option<&Path>) -> CliResult<Sink> {
        match path {
            None => Ok(Sink::Stdout(Vec::new())),
            Some(path) => {
                let dir = match path.parent() {
                    Some(p) if !p.as_os_str().is_empty() => p,
                    _ => Path::new("."),
                };
                if !dir.is_dir() {
                    return Err(CliError::usage(format!("output directory does not exist: {}", dir.display())));
                }
                let tmp = NamedTempFile::new_in(dir)?;
                Ok(Sink::File {
                    writer: BufWriter::with_capacity(1 << 20, tmp),
                    path: path.to_path_buf(),
                })
            }
        }
    }

    fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::File { writer, .. } => writer,
            Sink::Stdout(buf) => buf,
        }
    }

    fn commit(self, stdout: &mut dyn Write) -> CliResult {
        match self {
            Sink::File { writer, path } => {
                let tmp = writer.into_inner().map_err(|e| CliError::from(e.into_error()))?;
                tmp.persist(&path).map_err(|e| CliError::from(e.error))?;
            }
            Sink::Stdout(buf) => stdout.write_all(&buf)?,
        }
        Ok(())
    }
}

fn require_file(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::usage(format!("no such file: {}", path.display())))
    }
}

fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    Ok(BufReader::with_capacity(1 << 20, File::open(path)?))
}

fn check_document(doc: &Document) -> CliResult {
    match validate_document(doc).first() {
        None => Ok(()),
        Some(v) => Err(CliError::invariant(format!("document {}: {v}", doc.id))),
    }
}

fn thread_pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

/// Runs the command line and returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return ExitCode::Success as i32;
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            let _ = writeln!(stderr, "{line}");
            return ExitCode::Usage as i32;
        }
    };
    match run(cli, stdout, stderr) {
        Ok(()) => ExitCode::Success as i32,
        Err(e) => {
            let message = e.message.replace('\n', " ");
            let _ = writeln!(stderr, "error: {message}");
            e.code as i32
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    let pool = thread_pool(cli.threads)?;
    match cli.command {
        Command::Convert(args) => convert(args, stdout),
        Command::Enrich(args) => enrich(args, &pool, stdout, stderr),
        Command::Strip(args) => strip(args, stdout),
        Command::Stats(args) => stats(args, &pool, stdout),
        Command::Errors(args) => errors(args, stdout),
        Command::Eval(EvalCommand::Bleu(args)) => bleu(args, stdout),
        Command::Subset(args) => subset(args, &pool, stdout, stderr),
    }
}

fn convert(args: ConvertArgs, stdout: &mut dyn Write) -> CliResult {
    let inputs: Vec<&PathBuf> = match args.from {
        InputFormat::Mmax => match (&args.words, &args.markables) {
            (Some(w), Some(m)) => [w, m].into_iter().chain(args.sentences.as_ref()).collect(),
            _ => return Err(CliError::usage("mmax input needs --words and --markables")),
        },
        InputFormat::Conll | InputFormat::Jsonl => match &args.input {
            Some(p) => vec![p],
            None => return Err(CliError::usage("--input is required")),
        },
    };
    for p in &inputs {
        require_file(p)?;
    }
    let sink = Sink::open(args.out.as_deref())?;
    let docs = match args.from {
        InputFormat::Mmax => {
            let words = inputs[0];
            let doc_id = args.doc_id.clone().unwrap_or_else(|| {
                words
                    .file_stem()
                    .map(|s| s.to_string_lossy().trim_end_matches("_words").to_string())
                    .unwrap_or_default()
            });
            let cfg = MmaxConfig {
                genre: args.genre.clone(),
                ..MmaxConfig::default()
            };
            let sentences = args.sentences.as_deref().map(open_input).transpose()?;
            vec![parse_mmax(&doc_id, open_input(words)?, open_input(inputs[1])?, sentences, &cfg)?]
        }
        InputFormat::Conll => {
            let cfg = ConllConfig {
                word_col: args.conll.word_col,
                pos_col: Some(args.conll.pos_col),
                coref_col: args.conll.coref_col,
                genre: args.genre.clone(),
                ..ConllConfig::default()
            };
            parse_conll(open_input(inputs[0])?, &cfg)?
        }
        InputFormat::Jsonl => parse_jsonl(open_input(inputs[0])?)?,
    };
    emit_converted(docs, args.to, sink, stdout)
}

fn emit_converted(docs: Vec<Document>, to: OutputFormat, mut sink: Sink, stdout: &mut dyn Write) -> CliResult {
    let mut ids = BTreeSet::new();
    for doc in &docs {
        check_document(doc)?;
        if !ids.insert(doc.id.as_str()) {
            return Err(CliError::invariant(format!("duplicate document id {}", doc.id)));
        }
    }
    match to {
        OutputFormat::Jsonl => write_jsonl(sink.writer(), &docs)?,
        OutputFormat::Conll => write_conll(sink.writer(), &docs)?,
    }
    sink.commit(stdout)
}

/// Per-document result of the enrichment workers.
struct Rendered {
    text: String,
    index: String,
    enriched: Vec<bool>,
    conflicts: Vec<String>,
}

fn enrich_one(line: usize, text: &str, cfg: &EnrichmentConfig, want_conflicts: bool) -> CliResult<Rendered> {
    let doc = jsonl::from_line(text, line)?;
    check_document(&doc)?;
    let sentences = enrich_document(&doc, cfg).map_err(|e| match e {
        EnrichError::ReservedToken { .. } => CliError::invariant(e.to_string()),
        EnrichError::Config(c) => CliError::usage(c.to_string()),
    })?;
    let mut out = Rendered {
        text: String::new(),
        index: String::new(),
        enriched: Vec::with_capacity(sentences.len()),
        conflicts: Vec::new(),
    };
    for s in &sentences {
        push_line(&mut out.text, &s.tokens);
        push_index_line(&mut out.index, s);
        out.enriched.push(s.is_enriched());
    }
    if want_conflicts {
        out.conflicts = gender_conflicts(&doc, cfg)
            .into_iter()
            .map(|c| {
                format!(
                    "warning: document {}: mention {} is {} but head {} is {}",
                    c.doc_id, c.mention_id, c.mention_gender, c.head_id, c.head_gender
                )
            })
            .collect();
    }
    Ok(out)
}

/// Streams documents through the worker pool in fixed-size chunks and
/// hands the results to `sink` in input order.
fn enrich_stream(
    path: &Path,
    cfg: &EnrichmentConfig,
    want_conflicts: bool,
    pool: &rayon::ThreadPool,
    mut sink: impl FnMut(Rendered) -> CliResult,
) -> CliResult {
    let mut reader = open_input(path)?;
    let mut chunk: Vec<(usize, String)> = Vec::with_capacity(CHUNK);
    let mut line_no = 0;
    let mut done = false;
    while !done {
        chunk.clear();
        while chunk.len() < CHUNK {
            let mut buf = String::new();
            if reader.read_line(&mut buf)? == 0 {
                done = true;
                break;
            }
            line_no += 1;
            if line_no == 1 && buf.starts_with('\u{feff}') {
                buf.drain(..'\u{feff}'.len_utf8());
            }
            if !buf.trim().is_empty() {
                chunk.push((line_no, buf));
            }
        }
        let results: Vec<CliResult<Rendered>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|(line, text)| enrich_one(*line, text.trim_end_matches(['\n', '\r']), cfg, want_conflicts))
                .collect()
        });
        for r in results {
            sink(r?)?;
        }
    }
    Ok(())
}

fn enrich(args: EnrichArgs, pool: &rayon::ThreadPool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    require_file(&args.docs)?;
    let cfg = args.enrichment.config()?;
    let mut out = Sink::open(args.out.as_deref())?;
    let mut index = match &args.index {
        Some(p) => Some(Sink::open(Some(p))?),
        None => None,
    };
    let mut warnings = Vec::new();
    enrich_stream(&args.docs, &cfg, args.enrichment.log_conflicts, pool, |r| {
        out.writer().write_all(r.text.as_bytes())?;
        if let Some(index) = index.as_mut() {
            index.writer().write_all(r.index.as_bytes())?;
        }
        warnings.extend(r.conflicts);
        Ok(())
    })?;
    out.commit(stdout)?;
    if let Some(index) = index {
        index.commit(stdout)?;
    }
    for w in warnings {
        let _ = writeln!(stderr, "{w}");
    }
    Ok(())
}

fn subset(args: SubsetArgs, pool: &rayon::ThreadPool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    require_file(&args.docs)?;
    let cfg = args.enrichment.config()?;
    let mut out = Sink::open(args.out.as_deref())?;
    let mut line = 0usize;
    let mut warnings = Vec::new();
    enrich_stream(&args.docs, &cfg, args.enrichment.log_conflicts, pool, |r| {
        let w = out.writer();
        for enriched in r.enriched {
            if enriched {
                writeln!(w, "{line}")?;
            }
            line += 1;
        }
        warnings.extend(r.conflicts);
        Ok(())
    })?;
    out.commit(stdout)?;
    for w in warnings {
        let _ = writeln!(stderr, "{w}");
    }
    Ok(())
}

fn strip(args: StripArgs, stdout: &mut dyn Write) -> CliResult {
    require_file(&args.input)?;
    let cfg = EnrichmentConfig {
        tag_open: args.tag_open,
        tag_close: args.tag_close,
        ..EnrichmentConfig::default()
    };
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let mut out = Sink::open(args.out.as_deref())?;
    let mut text = String::new();
    for (i, line) in read_tagged_lines(open_input(&args.input)?).enumerate() {
        let tokens = line?;
        let stripped = strip_tags(&tokens, &cfg).map_err(|e| CliError::parse(format!("line {}: {e}", i + 1)))?;
        push_line(&mut text, &stripped);
        if text.len() > 1 << 20 {
            out.writer().write_all(text.as_bytes())?;
            text.clear();
        }
    }
    out.writer().write_all(text.as_bytes())?;
    out.commit(stdout)
}

fn stats(args: StatsArgs, pool: &rayon::ThreadPool, stdout: &mut dyn Write) -> CliResult {
    for p in &args.docs {
        require_file(p)?;
    }
    if !args.corpus.is_empty() && args.corpus.len() != args.docs.len() {
        return Err(CliError::usage("give one --corpus label per --docs file"));
    }
    if args.min_chain_size == 0 {
        return Err(CliError::usage("--min-chain-size must be at least 1"));
    }
    let sink = Sink::open(args.out.as_deref())?;
    let mut rows = Vec::new();
    for (i, path) in args.docs.iter().enumerate() {
        let corpus = args.corpus.get(i).cloned().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        });
        let mut by_genre: BTreeMap<String, Vec<(String, ChainStats)>> = BTreeMap::new();
        let mut reader = JsonlReader::new(open_input(path)?);
        loop {
            let batch: Vec<Document> = reader.by_ref().take(CHUNK).collect::<Result<_, _>>()?;
            if batch.is_empty() {
                break;
            }
            let results: Vec<CliResult<(String, String, ChainStats)>> = pool.install(|| {
                batch
                    .par_iter()
                    .map(|d| {
                        check_document(d)?;
                        Ok((d.genre.clone(), d.id.clone(), document_stats(d, args.min_chain_size)))
                    })
                    .collect()
            });
            for r in results {
                let (genre, id, s) = r?;
                by_genre.entry(genre).or_default().push((id, s));
            }
        }
        for (genre, mut per_doc) in by_genre {
            per_doc.sort_by(|a, b| a.0.cmp(&b.0));
            let modes: &[Aggregation] = match args.aggregation {
                AggregationChoice::Micro => &[Aggregation::Micro],
                AggregationChoice::Macro => &[Aggregation::Macro],
                AggregationChoice::Both => &[Aggregation::Micro, Aggregation::Macro],
            };
            for &mode in modes {
                if let Some(stats) = aggregate(per_doc.iter().map(|(_, s)| *s), mode) {
                    rows.push(StatsRow {
                        corpus: corpus.clone(),
                        genre: genre.clone(),
                        stats,
                    });
                }
            }
        }
    }
    let mut sink = sink;
    report::write_stats(sink.writer(), &rows, args.format.into())?;
    sink.commit(stdout)
}

fn errors(args: ErrorsArgs, stdout: &mut dyn Write) -> CliResult {
    require_file(&args.records)?;
    for (_, p) in &args.docs {
        require_file(p)?;
    }
    let mut sink = Sink::open(args.out.as_deref())?;
    let mut breakdown_sink = args.breakdown.as_deref().map(|p| Sink::open(Some(p))).transpose()?;

    let records = load_error_records(open_input(&args.records)?)?;
    let mut systems: BTreeMap<String, BTreeMap<String, Vec<Document>>> = BTreeMap::new();
    for (system, path) in &args.docs {
        for doc in parse_jsonl(open_input(path)?)? {
            check_document(&doc)?;
            systems
                .entry(system.clone())
                .or_default()
                .entry(doc.genre.clone())
                .or_default()
                .push(doc);
        }
    }
    for rec in &records {
        let known = systems
            .get(&rec.system)
            .is_some_and(|genres| genres.values().flatten().any(|d| d.id == rec.doc_id));
        if !known {
            return Err(CliError::invariant(format!(
                "record for mention {} refers to unknown document {} of system {}",
                rec.mention_id, rec.doc_id, rec.system
            )));
        }
    }
    let mut reports: Vec<ErrorReport> = Vec::new();
    for (system, genres) in &systems {
        for (genre, docs) in genres {
            reports.push(build_report(system, genre, &records, docs).map_err(|e| CliError::invariant(e.to_string()))?);
        }
    }
    report::write_error_reports(sink.writer(), &reports, args.format.into())?;
    if let Some(b) = breakdown_sink.as_mut() {
        let rows: Vec<_> = reports.iter().flat_map(ErrorReport::category_breakdown).collect();
        report::write_breakdown(b.writer(), &rows, args.format.into())?;
    }
    sink.commit(stdout)?;
    if let Some(b) = breakdown_sink {
        b.commit(stdout)?;
    }
    Ok(())
}

fn read_segments(path: &Path) -> CliResult<Vec<Vec<String>>> {
    read_tagged_lines(open_input(path)?).map(|l| l.map_err(CliError::from)).collect()
}

fn read_subset(path: &Path, len: usize) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for (i, line) in open_input(path)?.lines().enumerate() {
        let line = line?;
        let text = line.trim().trim_start_matches('\u{feff}');
        if text.is_empty() {
            continue;
        }
        let idx: usize = text
            .parse()
            .map_err(|_| CliError::parse(format!("line {}: expected a line index, found {text:?}", i + 1)))?;
        if idx >= len {
            return Err(CliError::parse(format!("line {}: index {idx} beyond {len} segments", i + 1)));
        }
        out.push(idx);
    }
    Ok(out)
}

fn bleu(args: BleuArgs, stdout: &mut dyn Write) -> CliResult {
    require_file(&args.hyp)?;
    require_file(&args.reference)?;
    if let Some(s) = &args.subset {
        require_file(s)?;
    }
    let hyp = read_segments(&args.hyp)?;
    let reference = read_segments(&args.reference)?;
    let smoothing = match args.smoothing {
        SmoothingChoice::None => Smoothing::None,
        SmoothingChoice::AddOne => Smoothing::AddOne,
    };
    let score = |h: &[Vec<String>], r: &[Vec<String>]| {
        corpus_bleu::<_, _, String, String>(h, r, smoothing)
            .map(|s| s.score)
            .map_err(|e| CliError::invariant(e.to_string()))
    };
    let all = score(&hyp, &reference)?;
    let coref = match &args.subset {
        Some(path) => {
            let idx = read_subset(path, hyp.len().min(reference.len()))?;
            let pick = |v: &[Vec<String>]| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
            Some(score(&pick(&hyp), &pick(&reference))?)
        }
        None => None,
    };
    let mut out = Vec::new();
    if args.report {
        let mut rows = vec![EvalRow {
            system: args.system.clone(),
            genre: args.genre.clone(),
            slice: "all".into(),
            bleu: all,
            meteor: args.meteor.clone(),
        }];
        if let Some(c) = coref {
            rows.push(EvalRow {
                system: args.system,
                genre: args.genre,
                slice: "coref".into(),
                bleu: c,
                meteor: args.meteor_coref,
            });
        }
        report::write_eval(&mut out, &rows, args.format.into(), args.decimals)?;
    } else {
        writeln!(out, "{}", report::format_bleu(coref.unwrap_or(all), args.decimals))?;
    }
    stdout.write_all(&out)?;
    Ok(())
}
