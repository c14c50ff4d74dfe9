//! Command-line front end for the `kinfuse` library.
//!
//! [`run`] parses arguments and writes to the given streams, so tests can
//! drive it without spawning a process. Exit codes: 0 on success, 1 when an
//! input file is missing or malformed, 2 on usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kinfuse::classifier::{fit_cv, LinearModel, TrainConfig};
use kinfuse::corpus::{
    load_corpus, preprocess, preprocess_corpus, CorpusFormat, LabeledCorpus, PreprocessConfig,
};
use kinfuse::evaluation::{compute_metrics, run_experiment, split, ExperimentConfig, SplitConfig};
use kinfuse::infusion::infuse_corpus_with;
use kinfuse::kg::{graph_stats, load_graph, validate_source};
use kinfuse::scorecard::{
    default_spec, evaluate_scorecard, load_spec, EmbeddingTable, ScorecardConfig,
};
use kinfuse::Exec;

#[derive(Debug, Parser)]
#[command(
    name = "kinfuse",
    version,
    about = "Knowledge-infused hate speech classification"
)]
struct Cli {
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect a knowledge graph file.
    #[command(subcommand)]
    Kg(KgCommand),
    /// Prefix every document with its knowledge context.
    Infuse {
        #[arg(long)]
        kg: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Shuffle a corpus and cut it into train and test files.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        fraction: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Fit a logistic regression model with cross-validated regularization.
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model_out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Score a labeled corpus with a saved model.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Compare the plain and knowledge-infused models over several seeds.
    Experiment {
        #[arg(long = "in")]
        input: PathBuf,
        /// Without a graph only the Base arm runs.
        #[arg(long)]
        kg: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "42,44,46,48,50")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 0.8)]
        fraction: f64,
        /// Print CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Test word embeddings against the stereotype scorecard.
    Scorecard {
        /// Text embeddings, one `word v1 v2 ...` per line.
        #[arg(long)]
        embeddings: PathBuf,
        /// Criteria JSON; the bundled 14-item scorecard when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        permutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Subcommand)]
enum KgCommand {
    /// Report structural problems; exits 1 if any is an error.
    Validate {
        #[arg(long)]
        kg: PathBuf,
    },
    /// Count entries by type; types with no entries are omitted.
    Stats {
        #[arg(long)]
        kg: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Csv,
}

#[derive(Debug, Args)]
struct FormatArg {
    /// Corpus layout; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl FormatArg {
    fn for_path(&self, path: &Path) -> CorpusFormat {
        match self.format {
            Some(Format::Tsv) => CorpusFormat::Tsv,
            Some(Format::Csv) => CorpusFormat::Csv,
            None => CorpusFormat::from_path(path),
        }
    }
}

fn read_corpus(path: &Path, format: &FormatArg) -> Result<LabeledCorpus> {
    load_corpus(path, format.for_path(path)).with_context(|| path.display().to_string())
}

fn write_corpus(corpus: &LabeledCorpus, path: &Path, format: &FormatArg) -> Result<()> {
    corpus
        .save(path, format.for_path(path))
        .with_context(|| path.display().to_string())
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "kinfuse: error: {}", one_line(&e));
            1
        }
    }
}

/// Joins the error chain on one line, dropping links whose text another
/// link already repeats (library errors often embed their source or path).
fn one_line(e: &anyhow::Error) -> String {
    let links: Vec<String> = e.chain().map(|c| c.to_string()).collect();
    let keep = |i: usize| {
        !links.iter().enumerate().any(|(j, other)| {
            j != i && other.contains(links[i].as_str()) && (other != &links[i] || j < i)
        })
    };
    let kept: Vec<&str> = (0..links.len())
        .filter(|&i| keep(i))
        .map(|i| links[i].as_str())
        .collect();
    kept.join(": ")
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    match cli.command {
        Command::Kg(KgCommand::Validate { kg }) => {
            let bytes = std::fs::read(&kg).with_context(|| kg.display().to_string())?;
            let (_, report) = validate_source(&bytes).with_context(|| kg.display().to_string())?;
            for f in &report.errors {
                writeln!(out, "error\t{}\t{}\t{}", f.code, f.key, f.message)?;
            }
            for f in &report.warnings {
                writeln!(out, "warning\t{}\t{}\t{}", f.code, f.key, f.message)?;
            }
            writeln!(
                out,
                "{} errors, {} warnings",
                report.errors.len(),
                report.warnings.len()
            )?;
            Ok(if report.is_ok() { 0 } else { 1 })
        }
        Command::Kg(KgCommand::Stats { kg }) => {
            let graph = load_graph(&kg).with_context(|| kg.display().to_string())?;
            let stats = graph_stats(&graph);
            for (kind, n) in stats.iter().filter(|&(_, n)| n > 0) {
                writeln!(out, "{kind}\t{n}")?;
            }
            writeln!(out, "total\t{}", stats.total)?;
            Ok(0)
        }
        Command::Infuse {
            kg,
            input,
            out: path,
            format,
        } => {
            let graph = load_graph(&kg).with_context(|| kg.display().to_string())?;
            let corpus = read_corpus(&input, &format)?;
            let infused = infuse_corpus_with(&graph, &corpus, exec);
            write_corpus(&infused, &path, &format)?;
            writeln!(
                out,
                "infused {} documents into {}",
                infused.len(),
                path.display()
            )?;
            Ok(0)
        }
        Command::Split {
            input,
            train_out,
            test_out,
            fraction,
            seed,
            format,
        } => {
            let cfg = SplitConfig::new(fraction, seed)?;
            let corpus = read_corpus(&input, &format)?;
            let (train, test) = split(&corpus, &cfg);
            write_corpus(&train, &train_out, &format)?;
            write_corpus(&test, &test_out, &format)?;
            writeln!(out, "train\t{}\ntest\t{}", train.len(), test.len())?;
            Ok(0)
        }
        Command::Train {
            input,
            model_out,
            seed,
            folds,
            format,
        } => {
            if folds < 2 {
                bail!("--folds must be at least 2");
            }
            let corpus = read_corpus(&input, &format)?;
            let corpus = preprocess_corpus(&corpus, &PreprocessConfig::default(), exec);
            let cfg = TrainConfig {
                folds,
                exec,
                ..TrainConfig::default()
            };
            let model = fit_cv(&corpus, &cfg, seed).with_context(|| input.display().to_string())?;
            model
                .save(&model_out)
                .with_context(|| model_out.display().to_string())?;
            writeln!(
                out,
                "regularization\t{}\nterms\t{}\nconverged\t{}",
                model.regularization,
                model.vocabulary.len(),
                model.meta.converged
            )?;
            Ok(0)
        }
        Command::Evaluate {
            model,
            input,
            threshold,
            format,
        } => {
            let m = LinearModel::load(&model).with_context(|| model.display().to_string())?;
            let corpus = read_corpus(&input, &format)?;
            let cfg = PreprocessConfig::default();
            let preds = exec.map(corpus.docs(), |d| {
                m.predict(&preprocess(&d.text, &cfg), threshold)
            });
            let labels = corpus.labels();
            let predicted: Vec<bool> = preds.iter().map(|p| p.label).collect();
            let scores: Vec<f64> = preds.iter().map(|p| p.probability).collect();
            let report = compute_metrics(&labels, &predicted, &scores)
                .with_context(|| input.display().to_string())?;
            let names = [
                "f1",
                "accuracy",
                "balanced_accuracy",
                "recall",
                "precision",
                "aucroc",
            ];
            for (name, v) in names.iter().zip(report.values()) {
                writeln!(out, "{name}\t{v:.6}")?;
            }
            for flag in &report.flags {
                writeln!(out, "flag\t{flag:?}")?;
            }
            Ok(0)
        }
        Command::Experiment {
            input,
            kg,
            seeds,
            fraction,
            csv,
            format,
        } => {
            SplitConfig::new(fraction, 0)?;
            let corpus = read_corpus(&input, &format)?;
            let graph = kg
                .as_ref()
                .map(|p| load_graph(p).with_context(|| p.display().to_string()))
                .transpose()?;
            let mut cfg = ExperimentConfig {
                split: fraction,
                exec,
                ..ExperimentConfig::default()
            };
            cfg.train.exec = exec;
            let report = run_experiment(&corpus, graph.as_ref(), &seeds, &cfg)?;
            write!(
                out,
                "{}",
                if csv {
                    report.to_csv()
                } else {
                    report.to_table()
                }
            )?;
            Ok(0)
        }
        Command::Scorecard {
            embeddings,
            spec,
            threshold,
            alpha,
            permutations,
            seed,
            csv,
        } => {
            let emb = EmbeddingTable::load(&embeddings)
                .with_context(|| embeddings.display().to_string())?;
            let criteria = match &spec {
                Some(p) => load_spec(p).with_context(|| p.display().to_string())?,
                None => default_spec(),
            };
            let cfg = ScorecardConfig {
                threshold,
                alpha,
                permutations,
                seed,
                exec,
            };
            let report = evaluate_scorecard(&emb, &criteria, &cfg);
            write!(
                out,
                "{}",
                if csv {
                    report.to_csv()
                } else {
                    report.to_table()
                }
            )?;
            Ok(0)
        }
    }
}
