//! Command-line front end: `sample`, `verify` and `edge-sample`.

mod edge;
mod sample;
pub mod stream;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::level::WeightFunction;
use crate::randomness::parse_seed_hex;

pub use verify::{run_suite, SuiteReport, TestOutcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "levy", version, about = "Exact G-samplers over incremental streams")]
struct Cli {
    /// 128-bit seed as hex.
    #[arg(long, global = true, env = "LEVY_SEED", default_value = "0")]
    seed: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Attach {
    /// Draws follow the position of each record in the stream.
    Position,
    /// Draws are keyed by the record itself, so reordering is harmless.
    Record,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay a stream through a sketch and report what it samples.
    Sample {
        /// Stream file of `key delta` lines (`-` for stdin).
        stream: PathBuf,
        #[arg(long, default_value = "fhalf")]
        g: String,
        /// gsampler | pareto | wor:<k> | kpareto:<k> | circuit:<file>
        #[arg(long, default_value = "gsampler")]
        sketch: String,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Attach::Position)]
        attach_randomness: Attach,
        /// Include every repetition's sample in the report.
        #[arg(long)]
        list_samples: bool,
    },
    /// Run a statistical verification suite.
    Verify {
        /// level | samplers | wor | circuits | frontier | all
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Sample edges of a graph by the fixed edge weight.
    EdgeSample {
        /// Graph file of `edge u v` lines.
        graph: PathBuf,
        /// Stream file of `vertex delta` lines.
        stream: PathBuf,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Attach::Position)]
        attach_randomness: Attach,
    },
}

/// What a sketch flag asks for.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchKind {
    GSampler,
    Pareto,
    Wor(usize),
    KPareto(usize),
    Circuit(PathBuf),
}

impl std::str::FromStr for SketchKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let k = |v: &str| -> Result<usize, String> {
            match v.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(format!("k must be a positive integer, got `{v}`")),
            }
        };
        match s.split_once(':') {
            None if s == "gsampler" => Ok(SketchKind::GSampler),
            None if s == "pareto" => Ok(SketchKind::Pareto),
            Some(("wor", v)) => Ok(SketchKind::Wor(k(v)?)),
            Some(("kpareto", v)) => Ok(SketchKind::KPareto(k(v)?)),
            Some(("circuit", p)) if !p.is_empty() => Ok(SketchKind::Circuit(PathBuf::from(p))),
            _ => Err(format!("unknown sketch `{s}`")),
        }
    }
}

/// A failure that maps to an exit status.
#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Io(String),
}

impl From<stream::InputError> for CliError {
    fn from(e: stream::InputError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub(crate) fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io(format!("stdin: {e}")))
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn emit(report: &serde_json::Value, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Usage(m)) | Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let seed = parse_seed_hex(&cli.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Sample {
            stream,
            g,
            sketch,
            reps,
            out,
            attach_randomness,
            list_samples,
        } => {
            let g: WeightFunction = g.parse().map_err(|e| CliError::Usage(format!("--g: {e}")))?;
            let sketch: SketchKind = sketch.parse().map_err(|e| CliError::Usage(format!("--sketch: {e}")))?;
            if reps == 0 {
                return Err(CliError::Usage("--reps must be at least 1".into()));
            }
            let text = read_input(&stream)?;
            let records = stream::parse_stream(&stream.display().to_string(), &text)?;
            let cfg = sample::SampleConfig {
                seed,
                g,
                sketch,
                reps,
                attach: attach_randomness,
                list_samples,
            };
            let report = sample::cmd_sample(&cfg, &records)?;
            emit(&report, out.as_ref())?;
            Ok(EXIT_PASS)
        }
        Command::Verify {
            suite,
            out,
            inject_fault,
        } => {
            let report = verify::cmd_verify(&suite, seed, inject_fault)?;
            let pass = report["pass"].as_bool().unwrap_or(false);
            emit(&report, out.as_ref())?;
            Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::EdgeSample {
            graph,
            stream,
            reps,
            out,
            attach_randomness,
        } => {
            if reps == 0 {
                return Err(CliError::Usage("--reps must be at least 1".into()));
            }
            let gtext = read_input(&graph)?;
            let edges = stream::parse_graph(&graph.display().to_string(), &gtext)?;
            let stext = read_input(&stream)?;
            let records = stream::parse_stream(&stream.display().to_string(), &stext)?;
            let report = edge::cmd_edge_sample(seed, &edges, &records, reps, attach_randomness)?;
            emit(&report, out.as_ref())?;
            Ok(EXIT_PASS)
        }
    }
}
