//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 restart budget exhausted,
//! 3 degenerate (collinear) input, 4 certificate check failed, 5 tree
//! replay failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::convex::{convex_angle, verify_bounding, ConvexConfig, ConvexError};
use crate::geometry::GeometryError;
use crate::input::{parse_script, ConvexRecord, InputDocument};
use crate::knowledge::KnowledgeState;
use crate::least::{learn_least, Auditor, LearnError, ScriptedAuditor, Silent};
use crate::oracle::{enumerate_tree, replay_paths, OracleAuditor};
use crate::reals::Precision;
use crate::trace::Trace;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;
pub const EXIT_CHECK: u8 = 4;
pub const EXIT_TREE: u8 = 5;

pub const DEFAULT_KMAX: Precision = 256;

#[derive(Debug, Parser)]
#[command(name = "realearn", version, about = "Learn least elements and convex angles over computable reals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn the least element of the reals in a document.
    Least {
        input: PathBuf,
        #[arg(long, env = "REALEARN_KMAX", default_value_t = DEFAULT_KMAX)]
        kmax: Precision,
        /// Defaults to 2^n for reals r_0..r_n.
        #[arg(long)]
        max_restarts: Option<u64>,
        /// `none`, `oracle` or `script:<path>`.
        #[arg(long, default_value = "oracle")]
        auditor: String,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Learn a convex angle of the points in a document.
    Convex {
        input: PathBuf,
        #[arg(long, env = "REALEARN_KMAX", default_value_t = DEFAULT_KMAX)]
        kmax: Precision,
        #[arg(long)]
        max_restarts: Option<u64>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Re-check a result written by `convex` against its input.
    Check {
        result: PathBuf,
        input: PathBuf,
        #[arg(long, env = "REALEARN_KMAX", default_value_t = DEFAULT_KMAX)]
        kmax: Precision,
    },
    /// Replay `least` traces against the computation tree of depth `n`.
    Tree {
        n: usize,
        #[arg(required = true)]
        traces: Vec<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<InputDocument, Failure> {
    InputDocument::parse(&read(path)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn default_budget(n: usize) -> u64 {
    u32::try_from(n)
        .ok()
        .and_then(|n| 1u64.checked_shl(n))
        .unwrap_or(u64::MAX)
}

fn convex_failure(e: ConvexError) -> Failure {
    match e {
        ConvexError::Geometry(GeometryError::DegenerateInput(t, k)) => fail(
            EXIT_DEGENERATE,
            format!("degenerate input: points {} {} {} are collinear up to k = {k}", t[0], t[1], t[2]),
        ),
        ConvexError::RestartBudgetExceeded(b) => fail(EXIT_BUDGET, format!("restart budget of {b} exceeded")),
        ConvexError::CertificateFailure(c) => fail(EXIT_CHECK, format!("check failed: {c}")),
        other => fail(EXIT_INPUT, other.to_string()),
    }
}

fn least(
    out: &mut dyn Write,
    input: &Path,
    kmax: Precision,
    max_restarts: Option<u64>,
    auditor: &str,
    trace_path: Option<&Path>,
) -> Result<(), Failure> {
    let doc = load(input)?;
    if doc.reals.is_empty() {
        return Err(fail(EXIT_INPUT, "document has no reals"));
    }
    let reals = doc.registry().map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let n = reals.len() - 1;
    let mut auditor: Box<dyn Auditor + '_> = match auditor {
        "none" => Box::new(Silent),
        "oracle" => Box::new(OracleAuditor::scanning(doc.real_limits(), &reals, kmax)),
        s => match s.strip_prefix("script:") {
            Some(p) => {
                let rounds = parse_script(&read(Path::new(p))?).map_err(|e| fail(EXIT_INPUT, format!("{p}: {e}")))?;
                Box::new(ScriptedAuditor::new(rounds))
            }
            None => return Err(fail(EXIT_INPUT, format!("unknown auditor `{s}`"))),
        },
    };
    let budget = max_restarts.unwrap_or_else(|| default_budget(n));
    let mut trace = Trace::new();
    let result = learn_least(&reals, n, auditor.as_mut(), KnowledgeState::empty(), budget, &mut trace);
    if let Some(p) = trace_path {
        write(p, &trace.to_jsonl())?;
    }
    match result {
        Ok(o) => {
            let _ = writeln!(out, "least {}", o.candidate.candidate);
            let _ = writeln!(out, "restarts {}", o.restarts);
            Ok(())
        }
        Err(LearnError::RestartBudgetExceeded { budget, .. }) => {
            Err(fail(EXIT_BUDGET, format!("restart budget of {budget} exceeded")))
        }
        Err(e) => Err(fail(EXIT_INPUT, e.to_string())),
    }
}

fn convex(
    out: &mut dyn Write,
    input: &Path,
    kmax: Precision,
    max_restarts: Option<u64>,
    trace_path: Option<&Path>,
    result_path: Option<&Path>,
) -> Result<(), Failure> {
    let doc = load(input)?;
    let points = doc.build_points().map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let budget = max_restarts.unwrap_or_else(|| default_budget(points.len().saturating_sub(1)));
    let mut trace = Trace::new();
    let result = convex_angle(&points, &ConvexConfig::new(kmax, budget), &mut trace);
    if let Some(p) = trace_path {
        write(p, &trace.to_jsonl())?;
    }
    let r = result.map_err(convex_failure)?;
    let _ = writeln!(out, "angle {} {} {}", r.a, r.b, r.c);
    let _ = writeln!(out, "restarts {}", r.restarts);
    let _ = writeln!(out, "max-witness {}", r.certificate.max_witness());
    if let Some(p) = result_path {
        write(p, &ConvexRecord::from(&r).to_jsonl())?;
    }
    Ok(())
}

fn check(out: &mut dyn Write, result: &Path, input: &Path, kmax: Precision) -> Result<(), Failure> {
    let record = ConvexRecord::parse(&read(result)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", result.display())))?;
    let doc = load(input)?;
    let points = doc.build_points().map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let cert = verify_bounding(&points, record.a, record.b, record.c, kmax).map_err(convex_failure)?;
    if cert != record.certificate {
        return Err(fail(EXIT_CHECK, "check failed: recorded witnesses differ from re-derived ones"));
    }
    let _ = writeln!(out, "ok {} {} {}", record.a, record.b, record.c);
    Ok(())
}

fn tree(out: &mut dyn Write, n: usize, traces: &[PathBuf]) -> Result<(), Failure> {
    let tree = enumerate_tree(n).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let mut runs = Vec::new();
    for p in traces {
        let t = Trace::parse_jsonl(&read(p)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
        runs.push(t.decision_paths());
    }
    let verdict = replay_paths(&tree, &runs).map_err(|e| fail(EXIT_TREE, e.to_string()))?;
    for (p, run) in traces.iter().zip(&verdict.runs) {
        let leaves: Vec<String> = run.leaves.iter().map(|l| l.to_string()).collect();
        let status = if run.passed() { "ok" } else { "FAIL" };
        let _ = writeln!(out, "{status} {} leaves {}", p.display(), leaves.join(" "));
    }
    if verdict.passed() {
        Ok(())
    } else {
        Err(fail(EXIT_TREE, "tree replay failed"))
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Least {
            input,
            kmax,
            max_restarts,
            auditor,
            trace,
        } => least(out, input, *kmax, *max_restarts, auditor, trace.as_deref()),
        Command::Convex {
            input,
            kmax,
            max_restarts,
            trace,
            result,
        } => convex(out, input, *kmax, *max_restarts, trace.as_deref(), result.as_deref()),
        Command::Check { result, input, kmax } => check(out, result, input, *kmax),
        Command::Tree { n, traces } => tree(out, *n, traces),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
