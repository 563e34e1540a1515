//! Command dispatch. [`run`] never touches the process state beyond reading
//! the input file and writing `--out`.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use odyn_core::family::{
    family_connective_structure, flexible_heaps, functional_heaps, generate, FamilyError, GenerationOptions,
};
use odyn_core::open::enumerate_open_realizations;
use odyn_core::GenerationMode;
use thiserror::Error;

use crate::format::{parse_family, serialize_open_dynamics, ParseError};

#[derive(Debug, Parser)]
#[command(
    name = "odyn",
    version,
    about = "Open graphic dynamics: realizations, generated dynamics and interactions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Work units allowed for heap computations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a family file.
    Validate { file: PathBuf },
    /// List the open realizations of one component.
    Realizations {
        file: PathBuf,
        #[arg(long)]
        component: String,
    },
    /// Print a generated dynamics.
    Generate {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Require succession along the synchronized edge.
        #[arg(long)]
        strict_edge: bool,
    },
    /// Print the functional or flexible heaps of every component.
    Heaps {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: HeapArg,
    },
    /// Print the connective structure of the interaction.
    Connective {
        file: PathBuf,
        #[arg(long)]
        include_empty: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    P,
    F,
    S,
    M,
}

impl From<ModeArg> for GenerationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::P => GenerationMode::Primo,
            ModeArg::F => GenerationMode::Functional,
            ModeArg::S => GenerationMode::Flexible,
            ModeArg::M => GenerationMode::Mono,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum HeapArg {
    F,
    S,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Family(#[from] FamilyError),
    #[error("unknown component {0}")]
    UnknownComponent(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for documents or computations that fail, 2 for unusable arguments.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn braces<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    let items: Vec<&str> = items.into_iter().map(String::as_str).collect();
    format!("{{{}}}", items.join(","))
}

/// Output of a command on the text of its file.
pub fn execute(command: &Command, budget: Option<u64>, text: &str) -> Result<String, CliError> {
    let doc = parse_family(text)?;
    let f = &doc.family;
    let mut out = String::new();
    match command {
        Command::Validate { .. } => out.push_str("OK\n"),
        Command::Realizations { component, .. } => {
            let a = f
                .component(component)
                .ok_or_else(|| CliError::UnknownComponent(component.clone()))?;
            for r in enumerate_open_realizations(a) {
                writeln!(out, "{r}").expect("write to string");
            }
        }
        Command::Generate { mode, strict_edge, .. } => {
            let mode = GenerationMode::from(*mode);
            let opts = GenerationOptions {
                strict_edge: *strict_edge,
                budget,
            };
            let d = generate(f, mode, opts)?;
            out = serialize_open_dynamics(&d, &format!("{}_{mode}", doc.name));
        }
        Command::Heaps { mode, .. } => {
            let heaps = match mode {
                HeapArg::F => functional_heaps(f, budget)?,
                HeapArg::S => flexible_heaps(f, budget)?,
            };
            for (i, n) in &heaps.0 {
                writeln!(out, "{i} {}", braces(n)).expect("write to string");
            }
        }
        Command::Connective { include_empty, .. } => {
            let parts: Vec<String> = family_connective_structure(f, *include_empty)
                .iter()
                .map(|j: &BTreeSet<String>| braces(j))
                .collect();
            writeln!(out, "{}", parts.join(" ")).expect("write to string");
        }
    }
    Ok(out)
}

fn file_of(command: &Command) -> &PathBuf {
    match command {
        Command::Validate { file }
        | Command::Realizations { file, .. }
        | Command::Generate { file, .. }
        | Command::Heaps { file, .. }
        | Command::Connective { file, .. } => file,
    }
}

fn run_parsed(cli: &Cli) -> Result<String, CliError> {
    let path = file_of(&cli.command);
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let out = execute(&cli.command, cli.budget, &text)?;
    match &cli.out {
        Some(p) => {
            std::fs::write(p, &out).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })?;
            Ok(String::new())
        }
        None => Ok(out),
    }
}

/// Runs `odyn` on a full argument vector, program name first.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            let (stdout, stderr) = if code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return Outcome { code, stdout, stderr };
        }
    };
    match run_parsed(&cli) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("odyn: {e}\n"),
        },
    }
}
