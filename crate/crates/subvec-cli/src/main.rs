//! Command-line interface over the sub-vector decomposition library:
//! children queries, tree-network reports, and the two benchmark harnesses.
//!
//! stdout carries only the report; diagnostics go to stderr. Exit codes:
//! 0 success, 2 data error (out-of-vocabulary words, degenerate supports),
//! 64 usage error, 74 unreadable or malformed input file.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use subvec::analogy::AnalogyMethod;
use subvec::categorize::{CategoryBenchConfig, CategoryMethod};
use subvec::corpora;
use subvec::decomp;
use subvec::embed::{load_glove_text, load_word2vec_binary, EmbeddingSpace, VocabFilter};
use subvec::ssn::{describe_shape, SsnShape};
use subvec::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EmbeddingFormat {
    Word2vec,
    Glove,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Parser)]
#[command(
    name = "subvec",
    version,
    about = "Decompose word embeddings into sub-vectors; query children, \
             describe tree networks, run the category and analogy benchmarks"
)]
struct Cli {
    /// Embedding file to load
    #[arg(long, global = true, value_name = "PATH")]
    embeddings: Option<PathBuf>,

    /// Embedding file format
    #[arg(long, global = true, value_enum, default_value_t = EmbeddingFormat::Word2vec)]
    format: EmbeddingFormat,

    /// Keep only the first N vocabulary entries (after any token filtering)
    #[arg(long, global = true, value_name = "N")]
    max_vocab: Option<usize>,

    /// Skip multi-word tokens (containing '_' or space) while loading
    #[arg(long, global = true)]
    drop_multiword: bool,

    /// Fall back to the lowercased token when a lookup misses
    #[arg(long, global = true)]
    lowercase_fallback: bool,

    /// Report format (tsv is available for the two eval commands)
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,

    /// Write the report to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Base seed for benchmark sampling
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shared root of the given words and its ranked children
    Children {
        /// Comma-separated word list
        #[arg(long, value_delimiter = ',', required = true)]
        words: Vec<String>,
    },
    /// Describe a semantic tree or tree network over the given words
    Ssn {
        /// Network shape: tree (≥2 words), binary (4), ternary (3), quad (4)
        #[arg(long, value_parser = parse_shape, default_value = "tree")]
        shape: SsnShape,
        /// Comma-separated word list
        #[arg(long, value_delimiter = ',', required = true)]
        words: Vec<String>,
        /// Children listed per node (0 skips the vocabulary scans)
        #[arg(long, default_value_t = 10)]
        k_cap: usize,
    },
    /// Category-completion benchmark over a closed-category corpus
    EvalCategory {
        /// Category corpus JSON; the bundled closed-class corpus when omitted
        #[arg(long, value_name = "PATH")]
        corpus: Option<PathBuf>,
        /// Build the category corpus from an analogy corpus's sections
        #[arg(long, value_name = "PATH", conflicts_with = "corpus")]
        from_analogy: Option<PathBuf>,
        /// Example fractions, comma-separated (default 0.1,0.2,0.3,0.4)
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,
        /// Methods: baseline, SSN, SVM<n> (default baseline,SSN,SVM100,SVM500)
        #[arg(long, value_delimiter = ',', value_parser = parse_category_method)]
        methods: Option<Vec<CategoryMethod>>,
        /// Seeded runs averaged per category
        #[arg(long, default_value_t = 5)]
        runs: usize,
    },
    /// Word-analogy benchmark over a four-token sectioned corpus
    EvalAnalogy {
        /// Analogy corpus file
        #[arg(long, value_name = "PATH")]
        corpus: PathBuf,
        /// Methods: add, mul, avr, branch, filter (default all five)
        #[arg(long, value_delimiter = ',', value_parser = parse_analogy_method)]
        methods: Option<Vec<AnalogyMethod>>,
    },
}

fn parse_shape(s: &str) -> Result<SsnShape, String> {
    s.parse()
}

fn parse_category_method(s: &str) -> Result<CategoryMethod, String> {
    s.parse()
}

fn parse_analogy_method(s: &str) -> Result<AnalogyMethod, String> {
    s.parse()
}

/// Failure + the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 64,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            // unreadable or malformed input files
            Error::Io(_)
            | Error::MalformedHeader(_)
            | Error::TruncatedRecord(_)
            | Error::NonFiniteValue(_)
            | Error::EmptyVocabulary
            | Error::InconsistentDimension(_)
            | Error::UnparsableNumber(_)
            | Error::DuplicateToken(_)
            | Error::InvalidToken(_)
            | Error::MalformedLine(_)
            | Error::NoSections
            | Error::SchemaViolation(_)
            | Error::DuplicateCategory(_)
            | Error::EmptyCategory(_) => 74,
            // malformed requests
            Error::ArityMismatch { .. } | Error::ScaleOutOfRange(_) => 64,
            // well-formed requests the data cannot answer
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 74,
            message: e.to_string(),
        }
    }
}

struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata) -> bool {
        metadata.level() <= log::Level::Warn
    }

    fn log(&self, record: &log::Record) {
        if self.enabled(record.metadata()) {
            eprintln!("{}: {}", record.level().to_string().to_lowercase(), record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn main() -> ExitCode {
    let _ = log::set_logger(&LOGGER).map(|()| log::set_max_level(log::LevelFilter::Warn));
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_space(cli: &Cli) -> Result<EmbeddingSpace, Failure> {
    let Some(path) = &cli.embeddings else {
        return Err(Failure::usage("--embeddings <PATH> is required"));
    };
    let filter = VocabFilter {
        max_vocab: cli.max_vocab,
        drop_multiword: cli.drop_multiword,
        lowercase_fallback: cli.lowercase_fallback,
    };
    let space = match cli.format {
        EmbeddingFormat::Word2vec => load_word2vec_binary(path, &filter)?,
        EmbeddingFormat::Glove => load_glove_text(path, &filter)?,
    };
    Ok(space)
}

fn emit(cli: &Cli, report: String) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, report + "\n")?,
        None => println!("{report}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Children { words } => {
            if cli.output == OutputFormat::Tsv {
                return Err(Failure::usage("children reports have no tsv layout"));
            }
            let space = load_space(&cli)?;
            let mut supports = Vec::with_capacity(words.len());
            for w in words {
                supports.push(space.lookup(w)?);
            }
            let alpha = decomp::root(&supports)?;
            let children = decomp::children(&space, &alpha)?;
            let report = serde_json::json!({
                "words": words,
                "root_norm": alpha.norm(),
                "count": children.len(),
                "children": children,
            });
            emit(&cli, serde_json::to_string_pretty(&report).expect("serializes"))
        }
        Command::Ssn {
            shape,
            words,
            k_cap,
        } => {
            if cli.output == OutputFormat::Tsv {
                return Err(Failure::usage("ssn reports have no tsv layout"));
            }
            let space = load_space(&cli)?;
            let report = describe_shape(&space, *shape, words, *k_cap)?;
            emit(&cli, report.to_json())
        }
        Command::EvalCategory {
            corpus,
            from_analogy,
            fractions,
            methods,
            runs,
        } => {
            let space = load_space(&cli)?;
            let corpus = match (corpus, from_analogy) {
                (Some(path), None) => corpora::load_category_corpus(path)?,
                (None, Some(path)) => {
                    corpora::analogy_sections_to_categories(&corpora::parse_google_analogy(path)?)
                }
                (None, None) => corpora::bundled_closed_categories(),
                (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
            };
            let config = CategoryBenchConfig {
                fractions: fractions
                    .clone()
                    .unwrap_or_else(|| vec![0.1, 0.2, 0.3, 0.4]),
                methods: methods.clone().unwrap_or_else(|| {
                    vec![
                        CategoryMethod::Baseline,
                        CategoryMethod::Ssn,
                        CategoryMethod::Svm { negatives: 100 },
                        CategoryMethod::Svm { negatives: 500 },
                    ]
                }),
                n_runs: *runs,
                base_seed: cli.seed,
            };
            let report = subvec::run_category_benchmark(&space, &corpus, &config)?;
            let rendered = match cli.output {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Tsv => report.to_tsv().trim_end().to_string(),
            };
            emit(&cli, rendered)
        }
        Command::EvalAnalogy { corpus, methods } => {
            let space = load_space(&cli)?;
            let sections = corpora::parse_google_analogy(corpus)?;
            let methods = methods.clone().unwrap_or_else(AnalogyMethod::all);
            let report = subvec::run_analogy_benchmark(&space, &sections, &methods)?;
            let rendered = match cli.output {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Tsv => report.to_tsv().trim_end().to_string(),
            };
            emit(&cli, rendered)
        }
    }
}
