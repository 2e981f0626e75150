use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use heckelab::document::{blocks_to_json, matrix_to_json, parse_expecting, Document, Kind};
use heckelab::exact_algebra::format_rational;
use heckelab::p1_bundle::splitting_from_h0;
use heckelab::suites::{run_suite, Suite};
use heckelab::{BlowupBundle, Error, HNProfile, HeckeTrace, P1Transition, Schedule, SplittingType};

const EXIT_INPUT: u8 = 2;
const EXIT_BUNDLE: u8 = 3;
const EXIT_PRECISION: u8 = 4;
const EXIT_COUNTEREXAMPLE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "heckelab",
    version,
    about = "Exact Hecke transforms across a blow-up exceptional divisor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input document (default: stdin)
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Report destination (default: stdout)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Splitting type of a p1_transition or of a blowup_bundle restricted to D
    Split {
        #[command(flatten)]
        io: Io,
        /// Cross-check Birkhoff against the h0 oracle
        #[arg(long)]
        verify: bool,
    },
    /// Run Hecke transforms until the restriction is optimal
    Optimize {
        #[command(flatten)]
        io: Io,
        /// Override the document's jet order
        #[arg(long)]
        jet_order: Option<u32>,
        /// Write the explored path as a Graphviz digraph
        #[arg(long, value_name = "PATH")]
        emit_dot: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ScheduleArg::TopBlock)]
        schedule: ScheduleArg,
    },
    /// Operations on HN profiles
    Profile {
        #[arg(value_enum)]
        operation: ProfileOp,
        #[command(flatten)]
        io: Io,
        /// Number of top blocks for `hecke` and `bound`
        #[arg(short, long, default_value_t = 1)]
        k: usize,
        /// Second profile for `equivalent`
        #[arg(long, value_name = "PATH")]
        other: Option<PathBuf>,
    },
    /// Seeded randomized property suite
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    TopBlock,
    GreedyBound,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileOp {
    Phi,
    Hecke,
    Bound,
    PartialHn,
    GrTilde,
    Normalize,
    Equivalent,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Involution,
    Descent,
    Oracle,
    Discreteness,
    Optimize,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Involution => Suite::Involution,
            SuiteArg::Descent => Suite::Descent,
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::Discreteness => Suite::Discreteness,
            SuiteArg::Optimize => Suite::Optimize,
        }
    }
}

/// A failed command: exit code, diagnostic, and any report still worth
/// writing (partial traces, counterexample lists).
struct Failure {
    code: u8,
    message: String,
    report: Option<Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
            report: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotInvertible | Error::NotABundleTransition(_) => EXIT_BUNDLE,
            Error::InsufficientJetOrder { .. } => EXIT_PRECISION,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
            report: None,
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn write_text(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn splitting_json(s: &SplittingType) -> Value {
    json!(s.exponents())
}

fn phi_string(n: i64) -> String {
    n.to_string()
}

fn cmd_split(io: &Io, verify: bool) -> Outcome {
    let text = read_input(io.input.as_deref())?;
    let (kind, restricted): (Kind, P1Transition) =
        match parse_expecting(&text, &[Kind::P1Transition, Kind::BlowupBundle])? {
            Document::P1Transition(t) => (Kind::P1Transition, t),
            Document::BlowupBundle(b, _) => (Kind::BlowupBundle, b.restrict_to_d()),
            Document::HnProfile(_) => unreachable!("kind checked"),
        };
    let splitting = restricted.splitting_type();
    let mut report = json!({
        "kind": kind.as_str(),
        "splitting": splitting_json(&splitting),
        "phi": phi_string(splitting.spread()),
        "hn_blocks": blocks_to_json(&splitting.hn_blocks()),
        "verified": false,
    });
    if verify {
        let oracle = splitting_from_h0(&restricted);
        if oracle != splitting {
            report["oracle_splitting"] = splitting_json(&oracle);
            return Err(Failure {
                code: EXIT_COUNTEREXAMPLE,
                message: format!("birkhoff {splitting} disagrees with h0 oracle {oracle}"),
                report: Some(report),
            });
        }
        report["verified"] = true.into();
    }
    Ok(report)
}

fn trace_json(trace: &HeckeTrace) -> Value {
    Value::Array(
        trace
            .steps
            .iter()
            .map(|s| {
                json!({
                    "top_blocks": s.top_blocks,
                    "sub_rank": s.sub_rank,
                    "splitting_before": splitting_json(&s.splitting_before),
                    "splitting_after": splitting_json(&s.splitting_after),
                    "phi_before": phi_string(s.phi_before),
                    "phi_after": phi_string(s.phi_after),
                    "jet_remaining": s.jet_remaining,
                })
            })
            .collect(),
    )
}

fn phi_trace_json(start: &BlowupBundle, trace: &HeckeTrace) -> Value {
    let seq = if trace.is_empty() {
        vec![start.phi()]
    } else {
        trace.phi_sequence()
    };
    Value::Array(seq.into_iter().map(|p| phi_string(p).into()).collect())
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Graphviz digraph of the explored path: one node per bundle, labelled by
/// its splitting type.
fn render_dot(start: &BlowupBundle, trace: &HeckeTrace, stopped: Option<&str>) -> String {
    let mut out = String::from("digraph hecke {\n  rankdir=LR;\n  node [shape=box];\n");
    let first = start.splitting();
    let _ = writeln!(
        out,
        "  n0 [label={}];",
        dot_quote(&format!("{first}\\nPhi={}", first.spread()))
    );
    for (i, step) in trace.steps.iter().enumerate() {
        let s = &step.splitting_after;
        let _ = writeln!(
            out,
            "  n{} [label={}];",
            i + 1,
            dot_quote(&format!("{s}\\nPhi={}", s.spread()))
        );
        let _ = writeln!(
            out,
            "  n{i} -> n{} [label={}];",
            i + 1,
            dot_quote(&format!("Hecke k={}", step.top_blocks))
        );
    }
    if let Some(reason) = stopped {
        let last = trace.len();
        let _ = writeln!(
            out,
            "  stop [shape=plaintext, label={}];",
            dot_quote(reason)
        );
        let _ = writeln!(out, "  n{last} -> stop [style=dashed];");
    }
    out.push_str("}\n");
    out
}

fn cmd_optimize(
    io: &Io,
    jet_order: Option<u32>,
    emit_dot: Option<&Path>,
    schedule: ScheduleArg,
) -> Outcome {
    let text = read_input(io.input.as_deref())?;
    let Document::BlowupBundle(mut bundle, _) = parse_expecting(&text, &[Kind::BlowupBundle])?
    else {
        unreachable!("kind checked")
    };
    if let Some(n) = jet_order {
        if let Some(d) = bundle.transition().x_degree().filter(|&d| d > n) {
            return Err(Failure::input(format!(
                "--jet-order {n} is below the highest x-power {d} in the input"
            )));
        }
        bundle = BlowupBundle::new(bundle.transition().with_jet_order(n))?;
    }
    let schedule = match schedule {
        ScheduleArg::TopBlock => Schedule::TopBlock,
        ScheduleArg::GreedyBound => Schedule::GreedyBound,
    };
    let write_dot = |trace: &HeckeTrace, stopped: Option<&str>| -> Result<(), Failure> {
        if let Some(path) = emit_dot {
            fs::write(path, render_dot(&bundle, trace, stopped))
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    };
    match bundle.optimize_with(schedule) {
        Ok((last, trace)) => {
            write_dot(&trace, None)?;
            Ok(json!({
                "initial_splitting": splitting_json(&bundle.splitting()),
                "final_splitting": splitting_json(&last.splitting()),
                "phi_trace": phi_trace_json(&bundle, &trace),
                "steps": trace.len(),
                "jet_order": bundle.jet_order(),
                "jet_remaining": last.jet_order(),
                "trace": trace_json(&trace),
                "final_transition": matrix_to_json(last.transition()),
            }))
        }
        Err(err) => {
            write_dot(&err.trace, Some("precision exhausted"))?;
            let report = json!({
                "error": err.error.to_string(),
                "initial_splitting": splitting_json(&bundle.splitting()),
                "last_splitting": splitting_json(&err.last.splitting()),
                "phi_trace": phi_trace_json(&bundle, &err.trace),
                "steps": err.trace.len(),
                "jet_order": bundle.jet_order(),
                "trace": trace_json(&err.trace),
            });
            let mut failure = Failure::from(err.error);
            failure.report = Some(report);
            Err(failure)
        }
    }
}

fn read_profile(path: Option<&Path>) -> Result<HNProfile, Failure> {
    let text = read_input(path)?;
    match parse_expecting(&text, &[Kind::HnProfile])? {
        Document::HnProfile(p) => Ok(p),
        _ => unreachable!("kind checked"),
    }
}

fn profile_json(p: &HNProfile) -> Value {
    json!({ "blocks": blocks_to_json(p), "phi": format_rational(&p.phi()) })
}

fn cmd_profile(op: ProfileOp, io: &Io, k: usize, other: Option<&Path>) -> Outcome {
    let p = read_profile(io.input.as_deref())?;
    let mut report = json!({ "input": profile_json(&p) });
    let result = match op {
        ProfileOp::Phi => json!({ "operation": "phi", "phi": format_rational(&p.phi()) }),
        ProfileOp::Hecke => {
            let h = p.hecke_profile(k)?;
            json!({ "operation": "hecke", "k": k, "result": profile_json(&h) })
        }
        ProfileOp::Bound => {
            let b = p.hecke_bound(k)?;
            json!({ "operation": "bound", "k": k, "bound": format_rational(&b) })
        }
        ProfileOp::PartialHn => {
            let partial = p.partial_hn();
            json!({ "operation": "partial-hn", "indices": partial.indices, "twists": partial.twists })
        }
        ProfileOp::GrTilde => {
            let g = p.gr_tilde();
            let partial = p.partial_hn();
            json!({
                "operation": "gr-tilde",
                "indices": partial.indices,
                "twists": partial.twists,
                "result": profile_json(&g),
            })
        }
        ProfileOp::Normalize => {
            json!({ "operation": "normalize", "result": profile_json(&p.normalize_twist()) })
        }
        ProfileOp::Equivalent => {
            let path = other.ok_or_else(|| Failure::input("equivalent needs --other PATH"))?;
            let q = read_profile(Some(path))?;
            report["other"] = profile_json(&q);
            json!({
                "operation": "equivalent",
                "equivalent": p.equivalent(&q),
                "graded_equivalent": p.graded_equivalent(&q),
            })
        }
    };
    for (key, value) in result.as_object().expect("object").clone() {
        report[key] = value;
    }
    Ok(report)
}

fn cmd_verify(suite: SuiteArg, count: u64, seed: u64) -> Outcome {
    let report = run_suite(suite.into(), count, seed);
    let passed = report.passed();
    let mut value = serde_json::to_value(&report).expect("reports serialize");
    value["passed"] = passed.into();
    if passed {
        Ok(value)
    } else {
        Err(Failure {
            code: EXIT_COUNTEREXAMPLE,
            message: format!(
                "{} counterexample(s) in suite {}",
                report.counterexamples.len(),
                report.suite
            ),
            report: Some(value),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, output) = match &cli.command {
        Command::Split { io, verify } => (cmd_split(io, *verify), io.output.clone()),
        Command::Optimize {
            io,
            jet_order,
            emit_dot,
            schedule,
        } => (
            cmd_optimize(io, *jet_order, emit_dot.as_deref(), *schedule),
            io.output.clone(),
        ),
        Command::Profile {
            operation,
            io,
            k,
            other,
        } => (
            cmd_profile(*operation, io, *k, other.as_deref()),
            io.output.clone(),
        ),
        Command::Verify {
            suite,
            count,
            seed,
            output,
        } => (cmd_verify(*suite, *count, *seed), output.clone()),
    };
    let (report, code) = match outcome {
        Ok(report) => (Some(report), 0),
        Err(f) => {
            eprintln!("heckelab: {}", f.message);
            (f.report, f.code)
        }
    };
    if let Some(report) = report {
        if let Err(e) = write_text(output.as_deref(), &render(&report)) {
            eprintln!("heckelab: cannot write report: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    ExitCode::from(code)
}
