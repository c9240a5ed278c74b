use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::rational::{parse_rational, Rational};

use super::commands::{self, Options, DEFAULT_CAP, DEFAULT_MAX_ITERATIONS, DEFAULT_WIDTH};
use super::document::{parse, Document, Payload};
use super::fuzz::fuzz_suite;
use super::report::{emit_report, Diagnostic, Mode, Report, Verdict};

#[derive(Parser, Debug)]
#[command(name = "lamcert", version, about = "Exact certification of growth-rate decrease for disc systems")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified bracket around the spectral radius of a matrix.
    Perron {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
        /// Target bracket width, a rational such as 1/1000000.
        #[arg(long, default_value = DEFAULT_WIDTH)]
        width: String,
    },
    /// Run the checks appropriate to the document's kind.
    Certify { file: PathBuf },
    /// Tighten an enlargement and certify the drop in growth rate.
    Tighten {
        file: PathBuf,
        #[arg(long)]
        p_max: Option<u32>,
    },
    /// Run the layered T0..T3 pipeline on a layered family.
    Layers {
        file: PathBuf,
        #[arg(long)]
        p_max: Option<u32>,
    },
    /// Push a surface away from a disc.
    Pushaway {
        file: PathBuf,
        /// Execute every maximal surgery order and compare the results.
        #[arg(long)]
        enumerate_all: bool,
        /// Most surgery orders to execute with --enumerate-all.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Comma-separated surgery order instead of lowest id first.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<u32>>,
    },
    /// Randomized suite: pf, propagation, pipeline or confluence.
    Fuzz {
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "LAMCERT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn load(path: &PathBuf, command: &str) -> Result<Document, Report> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let mut r = Report::new(command);
        r.flag(
            Verdict::InvalidInput,
            Diagnostic::new("read", path.display().to_string(), e.to_string()),
        );
        r
    })?;
    parse(&text).map_err(|e| {
        let mut r = Report::new(command);
        let errors = e.schema_errors();
        if errors.is_empty() {
            r.flag(Verdict::InvalidInput, Diagnostic::new("parse", "$", e.to_string()));
        }
        for s in errors {
            r.flag(
                Verdict::InvalidInput,
                Diagnostic::new("parse", s.path.clone(), format!("expected {}", s.expected)),
            );
        }
        r
    })
}

fn wrong_kind(command: &str, doc: &Document, wanted: &str) -> Report {
    let mut r = Report::new(command);
    r.flag(
        Verdict::InvalidInput,
        Diagnostic::new(command, "kind", format!("expected a {wanted} document, got {}", doc.kind())),
    );
    r
}

fn positive_width(text: &str) -> Option<Rational> {
    parse_rational(text).filter(|w| *w > Rational::from_integer(0.into()))
}

fn execute(command: Command) -> Report {
    let run = |file: &PathBuf, name: &str, f: &dyn Fn(&Document) -> Report| match load(file, name) {
        Ok(doc) => f(&doc),
        Err(report) => report,
    };
    match command {
        Command::Perron { file, max_iterations, width } => {
            let Some(width) = positive_width(&width) else {
                let mut r = Report::new("perron");
                r.flag(
                    Verdict::InvalidInput,
                    Diagnostic::new("perron", "--width", "expected a positive rational"),
                );
                return r;
            };
            run(&file, "perron", &|doc| commands::perron(doc, max_iterations, &width))
        }
        Command::Certify { file } => run(&file, "certify", &|doc| commands::certify(doc, &Options::default())),
        Command::Tighten { file, p_max } => run(&file, "tighten", &|doc| match &doc.payload {
            Payload::Enlargement(e) => commands::enlargement(e, p_max),
            _ => wrong_kind("tighten", doc, "enlargement"),
        }),
        Command::Layers { file, p_max } => run(&file, "layers", &|doc| match &doc.payload {
            Payload::LayeredFamily(f) => commands::layers(f, p_max),
            _ => wrong_kind("layers", doc, "layered-family"),
        }),
        Command::Pushaway { file, enumerate_all, cap, order } => {
            let options = Options {
                enumerate_all,
                cap,
                order,
                ..Options::default()
            };
            run(&file, "pushaway", &|doc| match &doc.payload {
                Payload::Pattern(p) => commands::pushaway(p, &options),
                _ => wrong_kind("pushaway", doc, "pattern"),
            })
        }
        Command::Fuzz { suite, trials, seed } => match fuzz_suite(&suite, trials, seed) {
            Ok(report) => report,
            Err(e) => {
                let mut r = Report::new("fuzz");
                r.flag(Verdict::InvalidInput, Diagnostic::new("fuzz", "SUITE", e.to_string()));
                r
            }
        },
    }
}

/// Runs the tool on `argv` (program name first). Never panics on bad input.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: Verdict::InvalidInput.exit_code(),
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mode = match cli.format {
        Format::Text => Mode::Text,
        Format::Json => Mode::Machine,
    };
    let report = execute(cli.command);
    Outcome {
        code: report.exit_code(),
        stdout: emit_report(&report, mode),
        stderr: String::new(),
    }
}
