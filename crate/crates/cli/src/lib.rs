//! Command-line front end for `unbounded-means`: the set-expression
//! language and the `umean` subcommands.

pub mod dsl;
pub mod reproduce;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use unbounded_means::constructions::{build_by_name, verify, BUILDER_NAMES};
use unbounded_means::extension::{cesaro_average, extend_mean, CesaroRegion, Status, TraceRow, WindowSchedule};
use unbounded_means::mean::{mean_by_name, MeanRef, MeanValue, MEAN_NAMES};
use unbounded_means::num::{fmt_sig, Q};
use unbounded_means::properties::{run_property, CheckConfig, Verdict3, PROPERTY_NAMES};
use unbounded_means::sets::RealSet;

pub use dsl::{parse_rational, parse_set, parse_set_expr, DslError, Pos, SetExpr};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDEFINED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "umean", version, about = "Generalized means of bounded and unbounded subsets of the real line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a mean on a set.
    Eval {
        #[arg(long)]
        mean: String,
        #[arg(long)]
        set: String,
    },
    /// Window extension of a mean, with an optional CSV trace.
    Extend {
        #[arg(long)]
        mean: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 48)]
        kmax: u32,
    },
    /// Cesàro double averages of window means up to `pmax`.
    Cesaro {
        #[arg(long)]
        mean: String,
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 64)]
        pmax: u32,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Region::Quadrant)]
        region: Region,
    },
    /// Check a property of a mean on the built-in catalog.
    Check {
        #[arg(long)]
        mean: String,
        #[arg(long)]
        property: String,
        #[arg(long)]
        json: bool,
    },
    /// Build a set with a prescribed behaviour and verify it.
    Construct {
        #[arg(long)]
        builder: String,
        #[arg(long, default_value = "avg1")]
        mean: String,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Recompute the table of closed-form values.
    Reproduce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Region {
    Quadrant,
    Square,
}

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Error)]
enum CmdError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Undefined(String),
    #[error("{0}")]
    Io(String),
}

fn resolve_mean(name: &str) -> Result<MeanRef, CmdError> {
    mean_by_name(name).ok_or_else(|| {
        CmdError::Usage(format!(
            "unknown mean '{name}'; known: {} (prefixes simple:, recipext:, ext:)",
            MEAN_NAMES.join(", ")
        ))
    })
}

fn resolve_set(text: &str) -> Result<RealSet, CmdError> {
    parse_set(text).map_err(|e| CmdError::Usage(format!("in set expression: {e}")))
}

fn resolve_q(flag: &str, text: &str) -> Result<Q, CmdError> {
    parse_rational(text).map_err(|e| CmdError::Usage(format!("--{flag}: {e}")))
}

/// Decimal to 12 significant digits, or `+inf`/`-inf`.
pub fn csv_value(v: &MeanValue) -> String {
    match v {
        MeanValue::Finite(x) => fmt_sig(*x, 12),
        MeanValue::PlusInf => "+inf".into(),
        MeanValue::MinusInf => "-inf".into(),
        MeanValue::Divergent => "divergent".into(),
        MeanValue::Undefined => "undefined".into(),
    }
}

pub fn write_trace(path: &std::path::Path, rows: &[TraceRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "x", "y", "value"])?;
    for r in rows {
        w.write_record([r.k.to_string(), fmt_sig(r.x, 12), fmt_sig(r.y, 12), csv_value(&r.value)])?;
    }
    w.flush()
}

fn eval(mean: &str, set: &str) -> Result<(i32, String), CmdError> {
    let k = resolve_mean(mean)?;
    let h = resolve_set(set)?;
    match k.eval(&h) {
        MeanValue::Undefined => Err(CmdError::Undefined(format!(
            "undefined: {} is outside the domain of {}",
            h.to_dsl(),
            k.name()
        ))),
        v => Ok((EXIT_OK, format!("{v}\n"))),
    }
}

fn extend(mean: &str, set: &str, trace: Option<&PathBuf>, kmax: u32) -> Result<(i32, String), CmdError> {
    let k = resolve_mean(mean)?;
    let h = resolve_set(set)?;
    let sched = WindowSchedule { k_max: kmax.min(60), ..WindowSchedule::default() };
    let ver = extend_mean(k.as_ref(), &h, &sched);
    if let Some(path) = trace {
        write_trace(path, &ver.trace).map_err(|e| CmdError::Io(format!("writing {}: {e}", path.display())))?;
    }
    if ver.status == Status::Undefined {
        return Err(CmdError::Undefined(ver.to_string()));
    }
    Ok((EXIT_OK, format!("{ver}\n")))
}

fn cesaro(mean: &str, set: &str, pmax: u32, grid: usize, region: Region) -> Result<(i32, String), CmdError> {
    let k = resolve_mean(mean)?;
    let h = resolve_set(set)?;
    if pmax == 0 || grid == 0 {
        return Err(CmdError::Usage("--pmax and --grid must be positive".into()));
    }
    let mut ps: Vec<f64> = std::iter::successors(Some(1u32), |p| p.checked_mul(2))
        .take_while(|&p| p < pmax)
        .map(f64::from)
        .collect();
    ps.push(f64::from(pmax));
    let region = match region {
        Region::Quadrant => CesaroRegion::Quadrant,
        Region::Square => CesaroRegion::Square,
    };
    let rows = cesaro_average(k.as_ref(), &h, &ps, grid, region);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CmdError::Io(e.to_string());
    w.write_record(["p", "value", "skipped", "untreatable"]).map_err(io)?;
    for r in &rows {
        let v = r.value.map_or_else(|| "none".to_string(), |v| fmt_sig(v, 12));
        w.write_record([fmt_sig(r.p, 12), v, r.skipped.to_string(), r.untreatable.to_string()])
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CmdError::Io(e.to_string()))?;
    Ok((EXIT_OK, String::from_utf8_lossy(&bytes).into_owned()))
}

fn check(mean: &str, property: &str, json: bool) -> Result<(i32, String), CmdError> {
    let k = resolve_mean(mean)?;
    let cfg = CheckConfig::default();
    let report = run_property(&k, property, &cfg).ok_or_else(|| {
        CmdError::Usage(format!(
            "unknown property '{property}'; known: {} (or dominance:<mean>)",
            PROPERTY_NAMES.join(", ")
        ))
    })?;
    let status = if report.verdict == Verdict3::Holds { EXIT_OK } else { EXIT_FAILED };
    let text = if json { format!("{}\n", report.to_json()) } else { report.to_text() };
    Ok((status, text))
}

fn construct(builder: &str, mean: &str, eps: &str, h: Option<&str>, n: Option<u32>) -> Result<(i32, String), CmdError> {
    let k = resolve_mean(mean)?;
    let eps = resolve_q("eps", eps)?;
    let h = h.map(|t| resolve_q("h", t)).transpose()?;
    let built = build_by_name(builder, &k, &eps, h.as_ref(), n).ok_or_else(|| {
        CmdError::Usage(format!("unknown builder '{builder}'; known: {}", BUILDER_NAMES.join(", ")))
    })?;
    match built {
        Ok(c) => {
            let again = verify(&c);
            let mut text = c.to_text();
            let ok = c.certificate.ok() && again.ok();
            text.push_str(&format!("certificate: {}\n", if ok { "verified" } else { "rejected" }));
            Ok((if ok { EXIT_OK } else { EXIT_FAILED }, text))
        }
        Err(e) => Ok((EXIT_FAILED, format!("{e}\n"))),
    }
}

fn reproduce() -> (i32, String) {
    let rows = reproduce::rows();
    let mut text: String = rows.iter().map(|r| format!("{}\n", r.line())).collect();
    let failed = rows.iter().filter(|r| !r.pass).count();
    text.push_str(&format!("{} of {} rows pass\n", rows.len() - failed, rows.len()));
    (if failed == 0 { EXIT_OK } else { EXIT_FAILED }, text)
}

/// Run one invocation; `argv[0]` is the program name.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { status, stdout: String::new(), stderr: text }
            } else {
                Outcome { status, stdout: text, stderr: String::new() }
            };
        }
    };
    let res = match &cli.command {
        Command::Eval { mean, set } => eval(mean, set),
        Command::Extend { mean, set, trace, kmax } => extend(mean, set, trace.as_ref(), *kmax),
        Command::Cesaro { mean, set, pmax, grid, region } => cesaro(mean, set, *pmax, *grid, *region),
        Command::Check { mean, property, json } => check(mean, property, *json),
        Command::Construct { builder, mean, eps, h, n } => construct(builder, mean, eps, h.as_deref(), *n),
        Command::Reproduce => Ok(reproduce()),
    };
    match res {
        Ok((status, stdout)) => Outcome { status, stdout, stderr: String::new() },
        Err(e) => {
            let status = match e {
                CmdError::Usage(_) => EXIT_USAGE,
                CmdError::Undefined(_) => EXIT_UNDEFINED,
                CmdError::Io(_) => EXIT_FAILED,
            };
            Outcome { status, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
    }
}
