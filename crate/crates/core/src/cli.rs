//! Command-line front end: `construct`, `verify`, `theorem`, `props`.
//!
//! Exit codes: 0 all checks pass, 1 a semantic check failed, 2 the input
//! could not be read or parsed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dc::{branch_from_shifts, shifts_from_branch, BranchCertificate};
use crate::error::{Error, Result};
use crate::hfa::HfaValue;
use crate::props;
use crate::report::Report;
use crate::shift::{run_shift_construction, verify_shift_trace, EStream, TraceFile};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "shiftdc",
    version,
    about = "Shift witnesses for the order-automorphism model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for parallel verification (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the evacuation recursion on a stream and write its trace.
    Construct {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a trace file against its stream.
    Verify {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Round-trip a branch certificate through both directions.
    Theorem {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every invariant suite.
    Props {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

/// Parsed invocation, without the thread setting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub steps: Option<usize>,
    pub seed: u64,
    pub stream_spec: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
}

/// What a command printed and how it ended.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(e: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stderr: format!("error: {e}\n"),
            ..Outcome::default()
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_stream(path: &Path) -> Result<EStream> {
    read_json(path)
}

pub fn cmd_construct(stream: &Path, steps: usize, out: &Path) -> Outcome {
    let stream = match load_stream(stream) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(e),
    };
    let trace = match run_shift_construction(&stream, steps) {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                code: EXIT_FAIL,
                stderr: format!("construction failed: {e}\n"),
                ..Outcome::default()
            }
        }
    };
    let report = verify_shift_trace(&trace, &stream);
    let file = TraceFile::new(&stream, trace);
    if let Err(e) = fs::write(out, file.to_pretty_json()) {
        return Outcome::input_error(e);
    }
    if report.all_passed() {
        Outcome::default()
    } else {
        Outcome {
            code: EXIT_FAIL,
            stderr: report.to_json_lines(),
            ..Outcome::default()
        }
    }
}

pub fn cmd_verify(stream: &Path, out: &Path) -> Outcome {
    let stream = match load_stream(stream) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(e),
    };
    let file: TraceFile = match read_json(out) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    let mut report = Report::new();
    if file.header.stream_hash == stream.hash() {
        report.pass("stream-hash", None);
    } else {
        report.fail(
            "stream-hash",
            None,
            "trace was built from a different stream",
        );
    }
    if file.header.n + 1 == file.steps.len() {
        report.pass("step-count", None);
    } else {
        report.fail(
            "step-count",
            None,
            format!(
                "header says N = {} but {} steps are recorded",
                file.header.n,
                file.steps.len()
            ),
        );
    }
    report.extend(verify_shift_trace(&file.trace(), &stream));
    Outcome {
        code: if report.all_passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        },
        stdout: report.to_json_lines(),
        stderr: String::new(),
    }
}

pub fn cmd_theorem(instance: &Path, seed: u64) -> Outcome {
    let cert: BranchCertificate = match read_json(instance) {
        Ok(c) => c,
        Err(e) => return Outcome::input_error(e),
    };
    let fail = |msg: String| Outcome {
        code: EXIT_FAIL,
        stderr: msg,
        ..Outcome::default()
    };
    let inst = match cert.instance() {
        Ok(i) => i,
        Err(e) => return fail(format!("{e}\n")),
    };
    let derived = match shifts_from_branch(&inst, &cert, &cert.groups, seed) {
        Ok(d) => d,
        Err(e) => return fail(format!("{e}\n")),
    };
    let mut report = derived.report;

    let s: Vec<HfaValue> = (0..cert.tau.len()).map(|n| inst.node(n + 1)).collect();
    let (t, forward) = branch_from_shifts(&inst, &s, &derived.pis);
    report.extend(forward);
    for (n, tn) in t.iter().enumerate() {
        let expected = HfaValue::seq(cert.t[..=n].iter().cloned());
        if *tn == expected {
            report.pass("round-trip", Some(n));
        } else {
            report.fail(
                "round-trip",
                Some(n),
                format!("recovered {tn:?}, certificate has {expected:?}"),
            );
        }
    }
    Outcome {
        code: if report.all_passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        },
        stdout: report.to_json_lines(),
        stderr: String::new(),
    }
}

pub fn cmd_props(seed: u64, cases: usize) -> Outcome {
    let results = props::run_all(seed, cases);
    let mut stdout = String::new();
    for r in &results {
        stdout.push_str(&serde_json::to_string(r).expect("serializable"));
        stdout.push('\n');
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
    let mut stderr = format!(
        "{} properties, {} cases each, {} failed\n",
        results.len(),
        cases,
        failed.len()
    );
    for r in &failed {
        let c = r.counterexample.as_ref().expect("failed");
        stderr.push_str(&format!(
            "FAIL {} (case {}, size {}): {}\n",
            r.name, c.case, c.size, c.detail
        ));
    }
    Outcome {
        code: if failed.is_empty() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        },
        stdout,
        stderr,
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let go = || match &cli.command {
        Command::Construct { stream, steps, out } => cmd_construct(stream, *steps, out),
        Command::Verify { stream, out } => cmd_verify(stream, out),
        Command::Theorem { stream, seed } => cmd_theorem(stream, *seed),
        Command::Props { seed, cases } => cmd_props(*seed, *cases),
    };
    if cli.threads == 0 {
        return go();
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool.install(go),
        Err(e) => Outcome::input_error(e),
    }
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        match &self.command {
            Command::Construct { stream, steps, out } => RunConfig {
                command: "construct".into(),
                steps: Some(*steps),
                seed: 0,
                stream_spec: Some(stream.clone()),
                out_path: Some(out.clone()),
            },
            Command::Verify { stream, out } => RunConfig {
                command: "verify".into(),
                steps: None,
                seed: 0,
                stream_spec: Some(stream.clone()),
                out_path: Some(out.clone()),
            },
            Command::Theorem { stream, seed } => RunConfig {
                command: "theorem".into(),
                steps: None,
                seed: *seed,
                stream_spec: Some(stream.clone()),
                out_path: None,
            },
            Command::Props { seed, .. } => RunConfig {
                command: "props".into(),
                steps: None,
                seed: *seed,
                stream_spec: None,
                out_path: None,
            },
        }
    }
}

/// Parses `args`, runs, writes the captured output, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
        }
    };
    let outcome = run(&cli);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    outcome.code
}
