//! Command-line driver: `famverify verify` and `famverify plan`.

mod expr;
mod format;

pub use expr::{parse_decimal, parse_phase, parse_value};
pub use format::{parse_equation_file, write_equation_file, InputError};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::checker::{run_plan, CheckSettings, Record, Report, Verdict, DEFAULT_TOLERANCE};
use crate::diagram::{EquationFamily, Language};
use crate::interp::{InterpretOptions, DEFAULT_MAX_ENTRIES};
use crate::planner::{build_plan, Assignment, GridMode, PlanSettings, PlannerError, VerificationPlan};

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "famverify", version, about = "Decide parameterised ZX/ZH/ZW equations by finite checking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the plan and check every equation in it.
    Verify(VerifyArgs),
    /// Show the bounds, grids and plan size without evaluating anything.
    Plan(PlanArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    /// Equation file.
    pub file: PathBuf,
    /// Override the file's parameter nesting mode.
    #[arg(long, value_parser = ["copy", "child"])]
    pub mode: Option<String>,
    /// One grid per variable, sized with every !-box at its bound (default).
    #[arg(long, conflicts_with = "per_equation_grid")]
    pub uniform_grid: bool,
    /// Size grids separately for every !-box instance.
    #[arg(long)]
    pub per_equation_grid: bool,
    /// Order of the ZX phase group for variables without their own `quotient` line (8 for Clifford+T).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub quotient: Option<u32>,
    /// Cap on stored entries per intermediate tensor and on dense output.
    #[arg(long, default_value_t = DEFAULT_MAX_ENTRIES)]
    pub max_dim: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Largest accepted entrywise deviation for floating-point entries.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write a JSON report to this path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Accept equality up to a nonzero global scalar.
    #[arg(long)]
    pub up_to_scalar: bool,
}

#[derive(Debug, Serialize)]
struct RecordFile {
    index: usize,
    assignment: BTreeMap<String, String>,
    deviation: Option<f64>,
    pass: bool,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ReportFile {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    equations: usize,
    mode: String,
    grid_mode: &'static str,
    bounds: BTreeMap<String, u64>,
    grids: BTreeMap<String, Vec<String>>,
    warnings: Vec<String>,
    counterexample: Option<RecordFile>,
    records: Vec<RecordFile>,
}

fn assignment_map(a: &Assignment) -> BTreeMap<String, String> {
    a.phases
        .iter()
        .map(|(k, v)| (k.clone(), v.to_string()))
        .chain(a.bangs.iter().map(|(k, v)| (k.clone(), v.to_string())))
        .collect()
}

fn record_file(r: &Record) -> RecordFile {
    RecordFile {
        index: r.index,
        assignment: assignment_map(&r.assignment),
        deviation: r.deviation.is_finite().then_some(r.deviation),
        pass: r.pass,
        exact: r.exact,
        error: r.error.clone(),
    }
}

fn grid_mode_name(g: GridMode) -> &'static str {
    match g {
        GridMode::Uniform => "uniform",
        GridMode::PerEquation => "per-equation",
    }
}

fn report_file(plan: Option<&VerificationPlan>, report: Option<&Report>, error: Option<String>) -> ReportFile {
    let verdict = report.map_or(Verdict::PreconditionFailed, |r| r.verdict);
    ReportFile {
        verdict: verdict.as_str(),
        error,
        equations: plan.map_or(0, VerificationPlan::len),
        mode: plan.map_or(String::new(), |p| p.mode.to_string()),
        grid_mode: plan.map_or("", |p| grid_mode_name(p.grid_mode)),
        bounds: plan.map(|p| p.bounds.clone()).unwrap_or_default(),
        grids: plan
            .map(|p| {
                p.grids
                    .iter()
                    .map(|(k, v)| (k.clone(), v.iter().map(ToString::to_string).collect()))
                    .collect()
            })
            .unwrap_or_default(),
        warnings: plan.map(|p| p.warnings.clone()).unwrap_or_default(),
        counterexample: report.and_then(|r| r.counterexample()).map(record_file),
        records: report.map(|r| r.records.iter().map(record_file).collect()).unwrap_or_default(),
    }
}

fn load(args: &PlanArgs) -> Result<EquationFamily, InputError> {
    let text = std::fs::read_to_string(&args.file).map_err(|e| InputError::Io {
        path: args.file.display().to_string(),
        message: e.to_string(),
    })?;
    let mut family = parse_equation_file(&text)?;
    if let Some(m) = &args.mode {
        family.mode = m.parse().map_err(InputError::Semantic)?;
    }
    if args.quotient.is_some() && family.language() != Language::Zx {
        return Err(InputError::Semantic(format!(
            "--quotient applies to ZX phases only, this file is {}",
            family.language()
        )));
    }
    Ok(family)
}

fn plan_settings(args: &PlanArgs) -> PlanSettings {
    PlanSettings {
        grid: if args.per_equation_grid {
            GridMode::PerEquation
        } else {
            GridMode::Uniform
        },
        quotient: args.quotient,
        interp: InterpretOptions {
            max_entries: args.max_dim,
            ..InterpretOptions::default()
        },
    }
}

/// Exit code for a planning failure.
fn planner_exit(e: &PlannerError) -> i32 {
    match e {
        PlannerError::Family(_) | PlannerError::Diagram(_) => EXIT_INPUT,
        _ => EXIT_PRECONDITION,
    }
}

fn make_plan(args: &PlanArgs, out: &mut dyn Write) -> Result<(EquationFamily, VerificationPlan), i32> {
    let family = match load(args) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(out, "input error: {e}");
            return Err(EXIT_INPUT);
        }
    };
    match build_plan(&family, &plan_settings(args)) {
        Ok(p) => Ok((family, p)),
        Err(e) => {
            let code = planner_exit(&e);
            let what = if code == EXIT_INPUT { "input error" } else { "precondition failed" };
            let _ = writeln!(out, "{what}: {e}");
            Err(code)
        }
    }
}

fn describe_plan(plan: &VerificationPlan, out: &mut dyn Write) {
    let _ = writeln!(
        out,
        "language {}, mode {}, {} grids",
        plan.language,
        plan.mode,
        grid_mode_name(plan.grid_mode)
    );
    for w in &plan.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    for (l, n) in &plan.bounds {
        let _ = writeln!(out, "N({l})={n}");
    }
    for (v, pts) in &plan.grids {
        let shown: Vec<String> = pts.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "|A({v})|={}: {}", pts.len(), shown.join(", "));
    }
    let _ = writeln!(out, "plan size {}", plan.len());
}

pub fn cmd_plan(args: &PlanArgs, out: &mut dyn Write) -> i32 {
    match make_plan(args, out) {
        Ok((_, plan)) => {
            describe_plan(&plan, out);
            EXIT_VERIFIED
        }
        Err(code) => code,
    }
}

fn write_report(path: &Path, file: &ReportFile, out: &mut dyn Write) -> bool {
    let json = serde_json::to_string_pretty(file).expect("report serialises");
    match std::fs::write(path, json + "\n") {
        Ok(()) => true,
        Err(e) => {
            let _ = writeln!(out, "input error: cannot write report `{}`: {e}", path.display());
            false
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> i32 {
    let (_, plan) = match make_plan(&args.plan, out) {
        Ok(p) => p,
        Err(code) => {
            if let Some(path) = &args.report {
                if code == EXIT_PRECONDITION {
                    let file = report_file(None, None, Some("precondition failed".into()));
                    write_report(path, &file, out);
                }
            }
            return code;
        }
    };
    for w in &plan.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let settings = CheckSettings {
        tolerance: args.tolerance,
        jobs: args.jobs,
        up_to_scalar: args.up_to_scalar,
        interp: InterpretOptions {
            max_entries: args.plan.max_dim,
            ..InterpretOptions::default()
        },
    };
    let report = match run_plan(&plan, &settings) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(out, "input error: {e}");
            return EXIT_INPUT;
        }
    };
    let _ = writeln!(
        out,
        "{} equations checked in {:.3}s, max deviation {:e}",
        report.records.len(),
        report.elapsed.as_secs_f64(),
        report.max_deviation()
    );
    let code = match report.verdict {
        Verdict::Verified => {
            let _ = writeln!(out, "verified");
            EXIT_VERIFIED
        }
        Verdict::Falsified => {
            let r = report.counterexample().expect("a failing record");
            let _ = writeln!(
                out,
                "falsified: equation #{} fails with deviation {:e} at {}",
                r.index, r.deviation, r.assignment
            );
            EXIT_FALSIFIED
        }
        Verdict::PreconditionFailed => {
            let r = report.records.iter().find(|r| r.error.is_some()).expect("an erroring record");
            let _ = writeln!(
                out,
                "precondition failed: equation #{} ({}): {}",
                r.index,
                r.assignment,
                r.error.as_deref().unwrap_or("")
            );
            EXIT_PRECONDITION
        }
    };
    if let Some(path) = &args.report {
        if !write_report(path, &report_file(Some(&plan), Some(&report), None), out) {
            return EXIT_INPUT;
        }
    }
    code
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, out),
        Command::Plan(a) => cmd_plan(a, out),
    }
}

/// Parse `args` (program name first) and run. Usage errors map to the
/// input-error code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out),
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_VERIFIED,
                _ => EXIT_INPUT,
            }
        }
    }
}
