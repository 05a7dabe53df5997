//! The `sp` command line.
//!
//! [`run`] takes the argument list and two sinks, so the binary stays a
//! one-liner and tests can drive every command in-process.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::alignment::{build_alignments, render_text, retrieve, structured, AlignmentView, SearchParams};
use crate::codec::text::{corpus_to_text, text_to_corpus};
use crate::codec::{compress_corpus, decompress_corpus, produce, read_container, write_container, Container, Encoding, GrammarSection};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::learning::{discover_chunks, learn, word_stream, GrammarCost};
use crate::model::{join, tokenize, tokenize_chars, Pattern, PatternStore, Symbol};
use crate::scoring::{aggregate_inferences, alignment_probabilities, infer, Inference};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sp", version, about = "Align, compress and learn from symbol sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Seed for the randomised generators.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub beam: Option<usize>,
    #[arg(long)]
    pub max_rows: Option<usize>,
    #[arg(long)]
    pub max_results: Option<usize>,
    #[arg(long)]
    pub exhaustive: bool,
}

impl SearchArgs {
    fn params(&self) -> Result<SearchParams> {
        let d = SearchParams::default();
        let p = SearchParams {
            beam_width: self.beam.unwrap_or(d.beam_width),
            max_rows: self.max_rows.unwrap_or(d.max_rows),
            max_results: self.max_results.unwrap_or(d.max_results),
            exhaustive: self.exhaustive,
            patience: d.patience,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Where a New pattern comes from.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Inline symbols, whitespace separated.
    #[arg(long, alias = "query", conflicts_with = "input")]
    pub new: Option<String>,
    /// File holding the pattern.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// One symbol per character instead of per whitespace-separated token.
    #[arg(long)]
    pub chars: bool,
}

impl InputArgs {
    fn symbols(&self) -> Result<Vec<Symbol>> {
        let text = match (&self.new, &self.input) {
            (Some(s), _) => s.clone(),
            (None, Some(path)) => read_file(path)?,
            (None, None) => return Err(Error::InvalidParams("give --new or --input".into())),
        };
        let syms = if self.chars { tokenize_chars(&text) } else { tokenize(&text) };
        if syms.is_empty() {
            return Err(Error::InvalidPattern("the New pattern has no symbols".into()));
        }
        Ok(syms)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank alignments of a New pattern against a store, with probabilities
    /// and inferences.
    #[command(visible_aliases = ["parse", "recognize"])]
    Align {
        #[arg(long)]
        store: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Stored patterns ranked by how well they encode a query.
    Retrieve {
        #[arg(long)]
        store: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Encode a text file (one sequence per line) into a container.
    Compress {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Record only the grammar's hash; decompression then needs --store.
        #[arg(long)]
        detached: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Rebuild the original text from a container.
    Decompress {
        #[arg(long)]
        input: PathBuf,
        /// Grammar for containers written with --detached.
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Expand an encoding (container item syntax) into symbols.
    Produce {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        code: String,
    },
    /// Derive new patterns from a corpus, or discover chunks with --chunks.
    Learn {
        /// One sequence per line.
        #[arg(long)]
        input: PathBuf,
        /// Starting store; empty if omitted.
        #[arg(long)]
        store: Option<PathBuf>,
        /// One symbol per character. Chunk discovery on a file without
        /// inner whitespace does this anyway.
        #[arg(long)]
        chars: bool,
        #[arg(long)]
        chunks: bool,
        /// Chunks to report.
        #[arg(long, default_value_t = 15)]
        max: usize,
        #[arg(long, default_value_t = 100)]
        max_chunks: usize,
        #[arg(long, default_value_t = 3)]
        min_count: u64,
        /// Ground-truth lexicon, one word per line.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        passes: usize,
        /// Also print the bracketed parse.
        #[arg(long)]
        show_parse: bool,
        /// Write the learned patterns here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Write a seeded no-space word stream and optionally its lexicon.
    Generate {
        #[arg(long, default_value_t = 10)]
        words: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        truth_out: Option<PathBuf>,
    },
    /// Print a bundled store.
    Fixture {
        #[arg(value_parser = ["fig1", "fig2"])]
        name: String,
    },
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) => EXIT_CONFIG,
        _ => EXIT_INPUT,
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load_store(path: &Path) -> Result<PatternStore> {
    let text = read_file(path)?;
    PatternStore::parse(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn write_output(path: Option<&Path>, out: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("plain data serialises");
    writeln!(out, "{text}")?;
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Align { store, input, search } => cmd_align(cli.format, store, input, search, out),
        Command::Retrieve { store, input, search } => cmd_retrieve(cli.format, store, input, search, out),
        Command::Compress {
            store,
            input,
            output,
            detached,
            search,
        } => cmd_compress(store, input, output.as_deref(), *detached, search, out),
        Command::Decompress { input, store, output } => cmd_decompress(input, store.as_deref(), output.as_deref(), out),
        Command::Produce { store, code } => {
            let store = load_store(store)?;
            let enc = Encoding::parse(&store, code)?;
            writeln!(out, "{}", join(&produce(&store, &enc)?))?;
            Ok(())
        }
        Command::Learn { chunks: true, .. } => cmd_chunks(cli, out),
        Command::Learn { .. } => cmd_learn(cli, out),
        Command::Generate { words, samples, truth_out } => {
            if *words == 0 || *samples == 0 {
                return Err(Error::InvalidParams("--words and --samples must be positive".into()));
            }
            let ws = word_stream(cli.seed, *words, *samples);
            if let Some(path) = truth_out {
                std::fs::write(path, ws.lexicon.join("\n") + "\n")?;
            }
            writeln!(out, "{}", ws.text)?;
            Ok(())
        }
        Command::Fixture { name } => {
            let text = if name == "fig1" { fixtures::FIG1_GRAMMAR } else { fixtures::FIG2_CLASSES };
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RankedView {
    rank: usize,
    ids: Vec<String>,
    raw_bits: f64,
    encoded_bits: f64,
    compression_difference: f64,
    probability: f64,
    alignment: AlignmentView,
    inferences: Vec<Inference>,
}

#[derive(Serialize)]
struct AlignReport {
    new: String,
    results: Vec<RankedView>,
    /// Pooled over all results.
    inferences: Vec<Inference>,
}

fn cmd_align(format: Format, store: &Path, input: &InputArgs, search: &SearchArgs, out: &mut dyn Write) -> Result<()> {
    let params = search.params()?;
    let store = load_store(store)?;
    let new = Pattern::new_input(input.symbols()?)?;
    let ranked = build_alignments(&store, &new, &params)?;
    let probs = alignment_probabilities(&ranked);
    let pooled = aggregate_inferences(&ranked, &probs)?;

    let results: Vec<RankedView> = ranked
        .iter()
        .zip(&probs)
        .enumerate()
        .map(|(i, ((al, score), p))| RankedView {
            rank: i + 1,
            ids: al.sorted_row_ids().iter().map(|id| id.to_string()).collect(),
            raw_bits: score.raw_bits.bits(),
            encoded_bits: score.encoded_bits.bits(),
            compression_difference: score.compression_difference,
            probability: p.p,
            alignment: structured(al, Some(*score)),
            inferences: infer(al, *p),
        })
        .collect();

    if format == Format::Structured {
        return emit_json(
            out,
            &AlignReport {
                new: join(new.symbols()),
                results,
                inferences: pooled,
            },
        );
    }
    let mut text = format!("new: {}\n", join(new.symbols()));
    for (r, (al, _)) in results.iter().zip(&ranked) {
        let _ = writeln!(
            text,
            "\n#{} rows [{}] raw {:.3} encoded {:.3} difference {:.3} p {:.6}",
            r.rank,
            r.ids.join(" "),
            r.raw_bits,
            r.encoded_bits,
            r.compression_difference,
            r.probability
        );
        text.push_str(&render_text(al));
    }
    text.push_str("\ninferences:\n");
    if pooled.is_empty() {
        text.push_str("  (none)\n");
    }
    for inf in &pooled {
        let _ = writeln!(text, "  {:.6} {} ({})", inf.p, inf.symbol, inf.pattern);
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct Hit {
    rank: usize,
    id: String,
    symbols: String,
    raw_bits: f64,
    encoded_bits: f64,
    compression_difference: f64,
}

fn cmd_retrieve(format: Format, store: &Path, input: &InputArgs, search: &SearchArgs, out: &mut dyn Write) -> Result<()> {
    let params = search.params()?;
    let store = load_store(store)?;
    let query = Pattern::new_input(input.symbols()?)?;
    let hits: Vec<Hit> = retrieve(&store, &query, &params)?
        .into_iter()
        .enumerate()
        .map(|(i, (p, s))| Hit {
            rank: i + 1,
            id: p.id().to_string(),
            symbols: join(p.symbols()),
            raw_bits: s.raw_bits.bits(),
            encoded_bits: s.encoded_bits.bits(),
            compression_difference: s.compression_difference,
        })
        .collect();
    if format == Format::Structured {
        return emit_json(out, &hits);
    }
    let mut text = String::new();
    for h in &hits {
        let _ = writeln!(text, "#{} {} difference {:.3}  {}", h.rank, h.id, h.compression_difference, h.symbols);
    }
    if hits.is_empty() {
        text.push_str("no matches\n");
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn cmd_compress(
    store: &Path,
    input: &Path,
    output: Option<&Path>,
    detached: bool,
    search: &SearchArgs,
    out: &mut dyn Write,
) -> Result<()> {
    let params = search.params()?;
    let store = load_store(store)?;
    let corpus = text_to_corpus(&read_file(input)?);
    let compressed = compress_corpus(&store, &corpus, &params)?;
    let grammar = if detached {
        GrammarSection::Detached {
            sha256: store.sha256_hex(),
        }
    } else {
        GrammarSection::Embedded(store)
    };
    let container = Container {
        grammar,
        encodings: compressed.encodings,
    };
    write_output(output, out, write_container(&container).as_bytes())
}

fn cmd_decompress(input: &Path, store: Option<&Path>, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let external = store.map(load_store).transpose()?;
    let (store, encodings) = read_container(&read_file(input)?, external.as_ref())?;
    let text = corpus_to_text(&decompress_corpus(&store, &encodings)?)?;
    write_output(output, out, text.as_bytes())
}

fn corpus_lines(text: &str, chars: bool) -> Vec<Vec<Symbol>> {
    text.lines()
        .map(|l| if chars { tokenize_chars(l) } else { tokenize(l) })
        .filter(|s| !s.is_empty())
        .collect()
}

#[derive(Serialize)]
struct ChunkRow {
    rank: usize,
    id: String,
    chunk: String,
    count: u64,
    in_truth: Option<bool>,
}

#[derive(Serialize)]
struct ChunkReport {
    chunks_found: usize,
    top: Vec<ChunkRow>,
    precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parse: Option<String>,
}

fn cmd_chunks(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let Command::Learn {
        input,
        chars,
        max,
        max_chunks,
        min_count,
        truth,
        show_parse,
        output,
        ..
    } = &cli.command
    else {
        unreachable!()
    };
    if *max_chunks == 0 || *min_count == 0 {
        return Err(Error::InvalidParams("--max-chunks and --min-count must be positive".into()));
    }
    let text = read_file(input)?;
    // chunk streams default to one symbol per character
    let stream: Vec<Symbol> = if *chars || !text.trim().contains(char::is_whitespace) {
        tokenize_chars(&text)
    } else {
        tokenize(&text)
    };
    if stream.len() < 2 {
        return Err(Error::InvalidPattern("chunk discovery needs at least two symbols".into()));
    }
    let truth: Option<Vec<String>> = truth
        .as_ref()
        .map(|p| read_file(p).map(|t| t.split_whitespace().map(str::to_string).collect()))
        .transpose()?;
    let lex = discover_chunks(&stream, *max_chunks, *min_count);
    let spell = |p: &Pattern| p.symbols().iter().map(|s| s.as_str()).collect::<String>();
    let top: Vec<ChunkRow> = lex
        .top(*max)
        .into_iter()
        .enumerate()
        .map(|(i, (p, count))| ChunkRow {
            rank: i + 1,
            id: p.id().to_string(),
            chunk: spell(p),
            count,
            in_truth: truth.as_ref().map(|t| t.contains(&spell(p))),
        })
        .collect();
    let precision = truth
        .as_ref()
        .map(|_| top.iter().filter(|r| r.in_truth == Some(true)).count() as f64 / top.len().max(1) as f64);
    if let Some(path) = output {
        let store = PatternStore::from_patterns(lex.chunks.clone())?;
        std::fs::write(path, store.to_pattern_file())?;
    }
    let report = ChunkReport {
        chunks_found: lex.chunks.len(),
        top,
        precision,
        parse: show_parse.then(|| lex.bracketed()),
    };
    if cli.format == Format::Structured {
        return emit_json(out, &report);
    }
    let mut text = format!("chunks found: {}\n", report.chunks_found);
    for r in &report.top {
        let mark = match r.in_truth {
            Some(true) => " *",
            _ => "",
        };
        let _ = writeln!(text, "{:>3} {:<6} {:>5}  {}{mark}", r.rank, r.id, r.count, r.chunk);
    }
    if let Some(p) = report.precision {
        let hits = report.top.iter().filter(|r| r.in_truth == Some(true)).count();
        let _ = writeln!(text, "precision {hits}/{} = {p:.3}", report.top.len());
    }
    if let Some(parse) = &report.parse {
        let _ = writeln!(text, "{parse}");
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct LearnView {
    before: GrammarCost,
    passes: Vec<GrammarCost>,
    after: GrammarCost,
    patterns: String,
}

fn cmd_learn(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let Command::Learn {
        input,
        store,
        chars,
        passes,
        output,
        search,
        ..
    } = &cli.command
    else {
        unreachable!()
    };
    let params = search.params()?;
    let start = match store {
        Some(p) => load_store(p)?,
        None => PatternStore::empty(),
    };
    let corpus = corpus_lines(&read_file(input)?, *chars);
    let report = learn(&start, &corpus, *passes, &params)?;
    let after = report.passes.last().copied().unwrap_or(report.initial);
    let patterns = report.store.to_pattern_file();
    if let Some(path) = output {
        std::fs::write(path, &patterns)?;
    }
    if cli.format == Format::Structured {
        return emit_json(
            out,
            &LearnView {
                before: report.initial,
                passes: report.passes,
                after,
                patterns,
            },
        );
    }
    let mut text = String::new();
    let line = |label: &str, c: &GrammarCost| {
        format!(
            "# {label:<8} grammar {:.3} encoding {:.3} total {:.3}\n",
            c.grammar_bits, c.encoding_bits, c.total_bits
        )
    };
    text.push_str(&line("before", &report.initial));
    for (i, c) in report.passes.iter().enumerate() {
        text.push_str(&line(&format!("pass {}", i + 1), c));
    }
    text.push_str(&line("after", &after));
    if output.is_none() {
        text.push_str(&patterns);
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}
