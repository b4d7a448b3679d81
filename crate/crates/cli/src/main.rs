//! `tdt`: batch workflows over temporal dependency tree documents.

mod selftest;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use tdtree::baseline::{predict_tree, GenreMode, ParserConfig};
use tdtree::format::{load_corpus, parse_draft, read_document};
use tdtree::inference::infer_relation;
use tdtree::metrics::ScoreTable;
use tdtree::normalize::{render, resolve_all_with, NormalizeOptions};
use tdtree::stats::{corpus_report, render_report};
use tdtree::validate::{has_errors, validate, validate_source};
use tdtree::{serialize_document, Document, MetaKind, Mode, Node, NodeKind};

#[derive(Debug, Parser)]
#[command(name = "tdt", version, about = "Temporal dependency tree corpus tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check documents against the annotation rules.
    Validate {
        #[arg(long, conflicts_with = "lenient")]
        strict: bool,
        /// Report stative-over-eventive attachments as warnings (default).
        #[arg(long)]
        lenient: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the resolved value of every time expression.
    Normalize {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the possible relations between node pairs.
    Infer {
        /// `a,b` pairs; separate several with `;` or repeat the flag.
        #[arg(long = "pairs", value_name = "A,B", conflicts_with = "all_pairs", required_unless_present = "all_pairs")]
        pairs: Vec<String>,
        /// Every pair of nodes of the selected kinds, in text order.
        #[arg(long)]
        all_pairs: bool,
        #[arg(long, value_delimiter = ',', default_value = "timex,event")]
        kinds: Vec<Kind>,
        file: PathBuf,
    },
    /// Score predictions against gold annotations, or annotators against each other.
    Score {
        #[arg(long, requires = "pred", conflicts_with = "pairs", required_unless_present = "pairs")]
        gold: Option<PathBuf>,
        #[arg(long, requires = "gold")]
        pred: Option<PathBuf>,
        /// A manifest with double annotations.
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
    /// Corpus statistics.
    Stats {
        manifest: PathBuf,
        /// Also write the counts as JSON.
        #[arg(long, value_name = "PATH")]
        counts_out: Option<PathBuf>,
    },
    /// Attach the nodes of a document with the heuristic baseline parser.
    ParseBaseline {
        #[arg(long, value_enum, default_value_t = GenreArg::Auto)]
        genre: GenreArg,
        #[arg(long, default_value_t = 2)]
        window: usize,
        input: PathBuf,
        output: PathBuf,
    },
    /// Re-serialize a document in canonical form.
    Convert {
        input: PathBuf,
        /// Defaults to standard output.
        output: Option<PathBuf>,
    },
    /// Check the composition table against independent oracles.
    Selftest {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0x7d7)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Timex,
    Event,
    Meta,
}

impl Kind {
    fn matches(self, kind: NodeKind) -> bool {
        matches!(
            (self, kind),
            (Kind::Timex, NodeKind::Timex) | (Kind::Event, NodeKind::Event) | (Kind::Meta, NodeKind::Meta)
        )
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenreArg {
    Auto,
    News,
    Narrative,
}

/// A failure of the tool itself rather than of its input.
#[derive(Debug)]
struct Internal(String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal error: {}", self.0)
    }
}

impl std::error::Error for Internal {}

const ERRORS_FOUND: u8 = 1;
const USAGE: u8 = 2;
const INTERNAL: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli));
    ExitCode::from(match outcome {
        Ok(Ok(status)) => status,
        Ok(Err(e)) if e.downcast_ref::<Internal>().is_some() => {
            eprintln!("tdt: {e:#}");
            INTERNAL
        }
        Ok(Err(e)) => {
            eprintln!("tdt: {e:#}");
            USAGE
        }
        Err(_) => INTERNAL,
    })
}

fn run(cli: Cli) -> Result<u8> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Validate { strict, files, .. } => {
            let mode = if strict { Mode::Strict } else { Mode::Lenient };
            validate_files(&files, mode)
        }
        Command::Normalize { files } => normalize_files(&mut out, &files),
        Command::Infer {
            pairs,
            all_pairs,
            kinds,
            file,
        } => infer(&mut out, &file, &pairs, all_pairs, &kinds),
        Command::Score { gold, pred, pairs } => score(&mut out, gold.as_deref(), pred.as_deref(), pairs.as_deref()),
        Command::Stats { manifest, counts_out } => stats(&mut out, &manifest, counts_out.as_deref()),
        Command::ParseBaseline {
            genre,
            window,
            input,
            output,
        } => parse_baseline(genre, window, &input, &output),
        Command::Convert { input, output } => {
            let bytes = serialize_document(&read_document(&input)?);
            match output {
                Some(path) => write_file(&path, &bytes)?,
                None => out.write_all(&bytes)?,
            }
            Ok(0)
        }
        Command::Selftest { samples, seed } => {
            let report = selftest::run(samples, seed);
            write!(out, "{report}")?;
            if report.passed() {
                Ok(0)
            } else {
                Err(Internal("composition table disagrees with an oracle".into()).into())
            }
        }
    }
}

fn normalize_options() -> NormalizeOptions {
    let off = std::env::var("TDT_DEMO_LEXICON").is_ok_and(|v| v.eq_ignore_ascii_case("off"));
    NormalizeOptions {
        demo_lexicon: !off,
        ..NormalizeOptions::default()
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("{}", path.display()))
}

fn validate_files(files: &[PathBuf], mode: Mode) -> Result<u8> {
    let mut status = 0;
    let stderr = io::stderr();
    for file in files {
        let bytes = match fs::read(file) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("tdt: {}: {e}", file.display());
                status = USAGE;
                continue;
            }
        };
        match validate_source(&bytes, mode) {
            Ok(diagnostics) => {
                let mut err = stderr.lock();
                for d in &diagnostics {
                    writeln!(err, "{}:{d}", file.display())?;
                }
                if has_errors(&diagnostics) && status == 0 {
                    status = ERRORS_FOUND;
                }
            }
            Err(e) => {
                eprintln!("tdt: {}: {e}", file.display());
                status = USAGE;
            }
        }
    }
    Ok(status)
}

/// Tabs and line breaks would break the column format.
fn one_line(s: &str) -> String {
    s.chars().map(|c| if c.is_control() { ' ' } else { c }).collect()
}

fn normalize_files(out: &mut impl Write, files: &[PathBuf]) -> Result<u8> {
    let options = normalize_options();
    for file in files {
        let doc = read_document(file)?;
        let resolved = resolve_all_with(&doc, &options).with_context(|| format!("{}", file.display()))?;
        if files.len() > 1 {
            writeln!(out, "# {}", file.display())?;
        }
        let mut timexes: Vec<_> = doc.anchored_nodes().into_iter().filter_map(|n| match n {
            Node::Timex(t) => Some(t),
            _ => None,
        }).collect();
        timexes.sort_by(|a, b| (a.span.start, &a.id).cmp(&(b.span.start, &b.id)));
        for t in timexes {
            let value = match resolved.get(&t.id) {
                Some(v) => render(v),
                None => "UNRESOLVED(unlocatable)".to_owned(),
            };
            writeln!(out, "{}\t{}\t{value}", t.id, one_line(&t.surface))?;
        }
    }
    Ok(0)
}

/// Tree nodes of the given kinds: meta nodes first, then text order.
fn ordered_nodes<'a>(doc: &'a Document, kinds: &[Kind]) -> Vec<&'a Node> {
    let mut nodes: Vec<&Node> = doc
        .tree
        .nodes()
        .iter()
        .filter(|n| kinds.iter().any(|k| k.matches(n.kind())))
        .collect();
    nodes.sort_by_key(|n| match n {
        Node::Meta(kind) => (0, MetaKind::ALL.iter().position(|k| k == kind).unwrap_or(0), 0, n.id()),
        _ => (1, 0, n.span().map_or(0, |s| s.start), n.id()),
    });
    nodes
}

fn infer(out: &mut impl Write, file: &Path, pairs: &[String], all_pairs: bool, kinds: &[Kind]) -> Result<u8> {
    let doc = read_document(file)?;
    let resolved = resolve_all_with(&doc, &normalize_options()).with_context(|| format!("{}", file.display()))?;
    let queries: Vec<(String, String)> = if all_pairs {
        let nodes = ordered_nodes(&doc, kinds);
        nodes
            .iter()
            .enumerate()
            .flat_map(|(i, a)| nodes[i + 1..].iter().map(move |b| (a.id().to_owned(), b.id().to_owned())))
            .collect()
    } else {
        let mut queries = Vec::new();
        for pair in pairs.iter().flat_map(|p| p.split([';', ' '])).filter(|p| !p.is_empty()) {
            let (a, b) = pair.split_once(',').ok_or_else(|| anyhow!("pair `{pair}` is not of the form a,b"))?;
            for id in [a, b] {
                if !doc.tree.contains(id) {
                    bail!("{}: no node `{id}`", file.display());
                }
            }
            queries.push((a.to_owned(), b.to_owned()));
        }
        queries
    };
    for (a, b) in queries {
        let set = infer_relation(&doc, &a, &b, &resolved).map_err(|e| Internal(e.to_string()))?;
        writeln!(out, "{a}\t{b}\t{set}")?;
    }
    Ok(0)
}

fn score(out: &mut impl Write, gold: Option<&Path>, pred: Option<&Path>, pairs: Option<&Path>) -> Result<u8> {
    let mut table = ScoreTable::default();
    match (gold, pred, pairs) {
        (Some(gold), Some(pred), None) => {
            let gold = load_corpus(gold)?;
            let pred = load_corpus(pred)?;
            for g in &gold.documents {
                let id = &g.document.id;
                let p = pred.find(id).ok_or_else(|| anyhow!("no prediction for document `{id}`"))?;
                table.add(&g.document, &p.document)?;
            }
            for p in &pred.documents {
                if gold.find(&p.document.id).is_none() {
                    eprintln!("tdt: warning: prediction `{}` has no gold document", p.document.id);
                }
            }
        }
        (None, None, Some(manifest)) => {
            let corpus = load_corpus(manifest)?;
            let pairs = corpus.pairs();
            if pairs.is_empty() {
                eprintln!("tdt: warning: {} lists no double annotations", manifest.display());
            }
            for (a, b) in pairs {
                table.add(&corpus.documents[a].document, &corpus.documents[b].document)?;
            }
        }
        _ => bail!("give either --gold and --pred, or --pairs"),
    }
    write!(out, "{}", table.render())?;
    Ok(0)
}

fn stats(out: &mut impl Write, manifest: &Path, counts_out: Option<&Path>) -> Result<u8> {
    let corpus = load_corpus(manifest)?;
    let report = corpus_report(corpus.documents.iter().map(|d| &d.document));
    write!(out, "{}", render_report(&report))?;
    if let Some(path) = counts_out {
        let value = serde_json::json!({
            "news": report.news,
            "narrative": report.narrative,
            "total": report.total(),
        });
        let mut bytes = serde_json::to_vec_pretty(&value)?;
        bytes.push(b'\n');
        write_file(path, &bytes)?;
    }
    Ok(0)
}

fn parse_baseline(genre: GenreArg, window: usize, input: &Path, output: &Path) -> Result<u8> {
    let bytes = fs::read(input).with_context(|| format!("{}", input.display()))?;
    let draft = parse_draft(&bytes).with_context(|| format!("{}", input.display()))?;
    let config = ParserConfig {
        genre_mode: match genre {
            GenreArg::Auto => GenreMode::Auto,
            GenreArg::News => GenreMode::News,
            GenreArg::Narrative => GenreMode::Narrative,
        },
        window,
    };
    let doc = predict_tree(draft, &config).with_context(|| format!("{}", input.display()))?;
    let diagnostics = validate(&doc, Mode::Strict);
    if let Some(d) = diagnostics.first() {
        return Err(Internal(format!("predicted tree violates {d}")).into());
    }
    write_file(output, &serialize_document(&doc))?;
    Ok(0)
}
