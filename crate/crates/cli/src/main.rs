//! `hidsym` command-line front end.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hidsym::hidden::DEFAULT_MAX_DIM;
use hidsym::{problem, props, Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use commands::Outcome;

#[derive(Parser)]
#[command(name = "hidsym", version, about = "Hidden symmetries and symmetry reduction of ODEs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Input file (problem, generators or structure constants), or an
    /// embedded example id. Repeat for a batch.
    #[arg(long, short, global = true)]
    input: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for batches; 0 uses all cores.
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Total degree of the polynomial ansatz for determining systems.
    #[arg(long, default_value_t = 2, global = true)]
    degree: usize,
    /// Seed for randomized property sampling.
    #[arg(long, default_value_t = 20240601, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Type I-IV of a pair of generators.
    ClassifyPair {
        /// Generator names from the input (default: the first two).
        names: Vec<String>,
        /// Chart `x,y` for `--field`.
        #[arg(long, default_value = "r,s")]
        chart: String,
        /// Field `xi;eta`; give twice instead of an input file.
        #[arg(long)]
        field: Vec<String>,
    },
    /// Closure, Jacobi identity, derived series and named type.
    Algebra,
    /// Point/nonlocal status of every generator along a path.
    Predict {
        /// Reduction path, e.g. `U,X,Y` (default: the input's path).
        #[arg(long, value_delimiter = ',')]
        path: Vec<String>,
        /// Report a single generator and its convertible order.
        #[arg(long)]
        generator: Option<String>,
    },
    /// Feasible reduction paths through the algebra.
    Plan {
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Split Z into Z0 + Z* relative to a canonical pair (X, Y).
    Decompose {
        /// Names of X, Y, Z (default: the first three).
        names: Vec<String>,
    },
    /// Solve the determining system of a canonical case.
    SolveDetermining {
        #[arg(long)]
        case: u32,
    },
    /// Run the reduction path of a problem.
    Reduce,
    /// Run an embedded example end to end ("all" for every one).
    VerifyExample {
        #[arg(default_value = "all")]
        ids: Vec<String>,
    },
    /// Integrate a first-order equation by its symmetry.
    Quadrature {
        #[arg(long)]
        generator: Option<String>,
    },
    /// Randomized property suites.
    CheckProperties {
        #[arg(long)]
        fields: Option<usize>,
        #[arg(long)]
        expressions: Option<usize>,
    },
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "syntax",
        Error::UnknownOperator(_) => "unknown-operator",
        Error::DivisionByZero => "division-by-zero",
        Error::NonRationalExponent(_) => "non-rational-exponent",
        Error::ChartMismatch(_) => "chart-mismatch",
        Error::InvalidInput(_) => "invalid-input",
        Error::Closure { .. } => "closure",
        Error::NotSymmetry(_) => "not-symmetry",
        Error::Coordinates(_) => "coordinates",
        Error::Shape(_) => "shape",
        Error::Internal(_) => "internal",
        Error::UnknownLabel(_) => "unknown-label",
    }
}

/// One unit of work: an input file or an example id.
fn run_one(cmd: &Command, g: &Global, source: Option<&str>) -> Result<Outcome> {
    let load = || -> Result<input::Input> {
        input::load(source.ok_or_else(|| Error::InvalidInput("this command needs --input".into()))?)
    };
    match cmd {
        Command::ClassifyPair { names, chart, field } => {
            if !field.is_empty() {
                commands::classify_pair(&commands::inline_fields(chart, field)?, &[])
            } else {
                commands::classify_pair(&load()?.fields()?, names)
            }
        }
        Command::Algebra => commands::algebra(&load()?),
        Command::Predict { path, generator } => commands::predict(&load()?, path, generator.as_deref()),
        Command::Plan { max_dim } => commands::plan(&load()?, *max_dim),
        Command::Decompose { names } => commands::decompose(&load()?.fields()?, names),
        Command::SolveDetermining { case } => commands::solve_determining(*case, g.degree),
        Command::Reduce => commands::reduce(load()?.problem()?),
        Command::VerifyExample { .. } => {
            commands::verify_example(source.ok_or_else(|| Error::InvalidInput("no example id".into()))?)
        }
        Command::Quadrature { generator } => commands::quadrature(load()?.problem()?, generator.as_deref()),
        Command::CheckProperties { fields, expressions } => {
            let mut sizes = props::Sizes::default();
            if let Some(f) = fields {
                sizes.fields = *f;
                sizes.prolongation_pairs = (*f / 2).max(1);
            }
            if let Some(e) = expressions {
                sizes.expressions = *e;
            }
            commands::check_properties(g.seed, &sizes)
        }
    }
}

/// Inputs the command runs over; `None` for commands without input.
fn sources(cli: &Cli) -> Vec<Option<String>> {
    match &cli.command {
        Command::VerifyExample { ids } => {
            if ids.iter().any(|i| i == "all") {
                problem::EXAMPLES.iter().map(|(id, _)| Some(id.to_string())).collect()
            } else {
                ids.iter().cloned().map(Some).collect()
            }
        }
        Command::SolveDetermining { .. } | Command::CheckProperties { .. } => vec![None],
        Command::ClassifyPair { field, .. } if !field.is_empty() => vec![None],
        _ if cli.global.input.is_empty() => vec![None],
        _ => cli.global.input.iter().cloned().map(Some).collect(),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

enum Status {
    Ok,
    Failed,
    Error,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build_global();
    }
    let srcs = sources(&cli);
    let results: Vec<(Option<String>, Result<Outcome>)> =
        srcs.into_par_iter().map(|s| (s.clone(), run_one(&cli.command, &cli.global, s.as_deref()))).collect();
    let batch = results.len() > 1;
    let mut status = Status::Ok;
    let mut docs: Vec<Value> = Vec::new();
    for (src, r) in results {
        let mut doc = match r {
            Ok(o) => {
                if !o.ok && !matches!(status, Status::Error) {
                    status = Status::Failed;
                }
                if cli.global.format == Format::Text {
                    if batch {
                        emit(&format!("== {}\n", src.as_deref().unwrap_or("-")));
                    }
                    emit(&o.text);
                }
                o.json
            }
            Err(e) => {
                status = Status::Error;
                let v = json!({"error": {"kind": error_kind(&e), "message": e.to_string()}});
                if cli.global.format == Format::Text {
                    eprintln!("error ({}): {e}", src.as_deref().unwrap_or("-"));
                }
                v
            }
        };
        if batch {
            if let (Some(s), Value::Object(m)) = (&src, &mut doc) {
                m.insert("input".into(), Value::String(s.clone()));
            }
        }
        docs.push(doc);
    }
    if cli.global.format == Format::Json {
        let out = if batch { Value::Array(docs) } else { docs.pop().unwrap_or(Value::Null) };
        emit(&format!("{}\n", serde_json::to_string_pretty(&out).expect("JSON values serialize")));
    }
    match status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Failed => ExitCode::from(1),
        Status::Error => ExitCode::from(2),
    }
}
