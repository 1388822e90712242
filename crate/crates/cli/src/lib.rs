//! Command-line front end: argument handling, command dispatch and report output.
//!
//! [`run`] does all the work and returns what the binary should print, so the
//! commands can be exercised without spawning a process.

pub mod format;
pub mod report;
pub mod repro;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use cohact_core::closures::{ContextSpec, Direction};
use cohact_core::coherence::{
    coherence_by_criterion, coherence_by_extension, ideality_test, CoherenceReport, ExtensionFailure,
};
use cohact_core::harness::{custom_bases, default_bases, hunt_counterexample, verify_context_theorems};
use cohact_core::points::{enumerate_points, PointBounds};
use cohact_core::varieties::{builtin, variety_membership};
use cohact_core::FiniteAlgebra;
use serde_json::json;

use format::{emit_algebra, load_algebra, load_context_file, load_point, FormatError};
use report::{InputDigest, RunReport};

#[derive(Debug, Parser)]
#[command(name = "cohact", version, about = "Finite-model workbench for coherent and ideal actions")]
pub struct Cli {
    /// Worker threads; 1 runs serially, 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Accepted for scripts that demand it; nothing here is random.
    #[arg(long, global = true)]
    pub seedless: bool,
    /// Lift the size ceilings on enumeration.
    #[arg(long, global = true)]
    pub unsafe_bounds: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Criterion,
    Extension,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide coherence and ideality of one point.
    Check {
        #[arg(long)]
        context: String,
        #[arg(long)]
        point: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Run the theorem assertions over every enumerated point.
    Verify {
        #[arg(long)]
        context: String,
        #[arg(long)]
        max: usize,
        /// Base algebra files; the context's default bases otherwise.
        #[arg(long = "base")]
        bases: Vec<PathBuf>,
    },
    /// List the points over a base up to isomorphism.
    EnumeratePoints {
        #[arg(long)]
        context: String,
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        max: usize,
    },
    /// Build the closure F(X) of a V-algebra.
    Closure {
        #[arg(long)]
        context: String,
        #[arg(long)]
        algebra: PathBuf,
        /// Write the closed algebra here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Look for a coherent point that is not ideal.
    Hunt {
        #[arg(long)]
        context: String,
        #[arg(long)]
        max: usize,
        #[arg(long = "base")]
        bases: Vec<PathBuf>,
        /// Write a found certificate here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Replay the worked examples.
    Repro,
    /// Check an algebra against a variety's identities.
    Membership {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        algebra: PathBuf,
    },
}

/// What the binary prints and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] cohact_core::Error),
    #[error("{0}")]
    Other(String),
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first) and runs the command.
pub fn run(args: &[String]) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).cloned().collect();
    let start = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("error: cannot start {} workers: {e}\n", cli.jobs),
                code: EXIT_INPUT,
            }
        }
    };
    let result = pool.install(|| dispatch(&cli, &echo));
    match result {
        Ok(mut report) => {
            let ms = start.elapsed().as_millis() as u64;
            report.timing_ms = Some(ms);
            let code = if report.passed { EXIT_OK } else { EXIT_FOUND };
            match cli.format {
                OutputFormat::Text => Outcome {
                    stdout: report.render_text(),
                    stderr: format!("({ms} ms)\n"),
                    code,
                },
                OutputFormat::Json => Outcome {
                    stdout: report.render_json(),
                    stderr: String::new(),
                    code,
                },
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_INPUT,
        },
    }
}

fn bounds(cli: &Cli, max: usize) -> PointBounds {
    PointBounds {
        unsafe_bounds: cli.unsafe_bounds,
        parallel: cli.jobs != 1,
        ..PointBounds::new(max)
    }
}

/// A built-in context name, or a path to a context file.
fn resolve_context(spec: &str, report: &mut RunReport) -> CliResult<(ContextSpec, bool)> {
    let path = Path::new(spec);
    if path.is_file() {
        digest(path, report)?;
        return Ok((load_context_file(path)?, true));
    }
    Ok((ContextSpec::builtin(spec)?, false))
}

fn digest(path: &Path, report: &mut RunReport) -> CliResult<()> {
    let d = InputDigest::of_file(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    report.inputs.push(d);
    Ok(())
}

fn load_digested(path: &Path, report: &mut RunReport) -> CliResult<FiniteAlgebra> {
    let alg = load_algebra(path)?.algebra;
    digest(path, report)?;
    Ok(alg)
}

fn dispatch(cli: &Cli, echo: &[String]) -> CliResult<RunReport> {
    let mut report = RunReport::new(echo);
    match &cli.command {
        Command::Check {
            context,
            point: point_path,
            method,
        } => {
            let (ctx, _) = resolve_context(context, &mut report)?;
            let (point, files) = load_point(&ctx, point_path)?;
            digest(point_path, &mut report)?;
            for f in &files {
                digest(f, &mut report)?;
            }
            report.context = Some(ctx.name.clone());
            check(&ctx, &point, *method, &mut report)?;
        }
        Command::Verify { context, max, bases } => {
            let (ctx, custom) = resolve_context(context, &mut report)?;
            report.context = Some(ctx.name.clone());
            let bases = pick_bases(&ctx, custom, bases, &mut report)?;
            let r = verify_context_theorems(&ctx, &bases, &bounds(cli, *max))?;
            report.passed = r.passed();
            report.verdict = r.verdict_text();
            report.data = serde_json::to_value(&r).expect("serializable");
        }
        Command::EnumeratePoints { context, base, max } => {
            let (ctx, _) = resolve_context(context, &mut report)?;
            report.context = Some(ctx.name.clone());
            let b = load_digested(base, &mut report)?.reduct(&ctx.u.signature)?;
            let points = enumerate_points(&ctx, &b, &bounds(cli, *max))?;
            let mut text = format!("{} points over |B| = {} with |A| <= {max}\n", points.len(), b.size());
            for (i, p) in points.iter().enumerate() {
                text.push_str(&format!("point {i}: |A| = {}, p = {}, s = {}\n", p.a.size(), p.p, p.s));
            }
            report.verdict = text;
            report.data = serde_json::to_value(&points).expect("serializable");
        }
        Command::Closure { context, algebra, emit } => {
            let (ctx, _) = resolve_context(context, &mut report)?;
            report.context = Some(ctx.name.clone());
            let x = load_digested(algebra, &mut report)?.reduct(&ctx.v.signature)?;
            let r = ctx.closure(&x)?;
            let doc = emit_algebra(&r.closed, None);
            let mut text = format!(
                "F(X): {} elements, unit {}, comparison {}, initial object of size {}\n",
                r.closed.size(),
                r.unit,
                r.comparison,
                r.initial.size()
            );
            match emit {
                Some(path) => {
                    std::fs::write(path, &doc).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
                    text.push_str(&format!("written to {}\n", path.display()));
                }
                None => text.push_str(&doc),
            }
            report.verdict = text;
            report.data = json!({
                "closed": r.closed,
                "unit": r.unit,
                "comparison": r.comparison,
                "direction": r.direction,
            });
        }
        Command::Hunt {
            context,
            max,
            bases,
            certificate,
        } => {
            let (ctx, custom) = resolve_context(context, &mut report)?;
            report.context = Some(ctx.name.clone());
            let bases = pick_bases(&ctx, custom, bases, &mut report)?;
            let out = hunt_counterexample(&ctx, &bases, &bounds(cli, *max))?;
            let mut text = String::new();
            for p in &out.probes {
                text.push_str(&format!("probe: {p}\n"));
            }
            for s in &out.skipped_bases {
                text.push_str(&format!("skipped base {s}\n"));
            }
            text.push_str(&out.summary());
            text.push('\n');
            if let Some(cert) = &out.certificate {
                report.passed = false;
                report.witnesses.push(format!("f = {}", cert.f));
                report.witnesses.extend(cert.ideality_trace.iter().cloned());
                if let Some(path) = certificate {
                    let body = serde_json::to_string_pretty(cert).expect("serializable");
                    std::fs::write(path, body).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
                    text.push_str(&format!("certificate written to {}\n", path.display()));
                }
            }
            report.verdict = text;
            report.data = serde_json::to_value(&out).expect("serializable");
        }
        Command::Repro => {
            let suite = repro::run_suite(&repro::Toolkit::default());
            report.passed = suite.passed();
            report.verdict = suite.verdict_text();
            report.data = serde_json::to_value(&suite).expect("serializable");
        }
        Command::Membership { variety, algebra } => {
            let v = builtin(variety)?;
            let a = load_digested(algebra, &mut report)?.reduct(&v.signature)?;
            let r = variety_membership(&a, &v)?;
            report.passed = r.member;
            report.verdict = match r.first_failure() {
                None => format!("member of {} ({} identities hold)\n", v.name, v.identities.len()),
                Some((id, verdict)) => {
                    report.witnesses.push(verdict.to_string());
                    format!("not a member of {}: {id} fails\n", v.name)
                }
            };
            report.data = serde_json::to_value(&r).expect("serializable");
        }
    }
    Ok(report)
}

fn pick_bases(ctx: &ContextSpec, custom: bool, files: &[PathBuf], report: &mut RunReport) -> CliResult<Vec<FiniteAlgebra>> {
    if !files.is_empty() {
        return files
            .iter()
            .map(|f| Ok(load_digested(f, report)?.reduct(&ctx.u.signature)?))
            .collect();
    }
    Ok(if custom { custom_bases(ctx)? } else { default_bases(ctx)? })
}

fn check(
    ctx: &ContextSpec,
    point: &cohact_core::points::SplitPoint,
    method: Method,
    report: &mut RunReport,
) -> CliResult<()> {
    let by_criterion = match method {
        Method::Extension => None,
        _ if ctx.criterion.is_none() && method == Method::Both => None,
        _ => Some(coherence_by_criterion(ctx, point)?),
    };
    let by_extension = match method {
        Method::Criterion => None,
        _ if ctx.closure.is_none() && method == Method::Both => None,
        _ => Some(coherence_by_extension(ctx, point)?),
    };
    let agreement = match (&by_criterion, &by_extension) {
        (Some(c), Some(e)) => Some(c.coherent == e.coherent()),
        _ => None,
    };
    let coherence = CoherenceReport {
        by_criterion,
        by_extension,
        agreement,
    };
    let ideality = ideality_test(ctx, point)?;
    let coherent = coherence.coherent();
    let mut text = String::new();
    if let Some(c) = &coherence.by_criterion {
        text.push_str(&format!(
            "criterion: {} ({})\n",
            if c.coherent { "coherent" } else { "not coherent" },
            c.detail
        ));
        if let Some(w) = c.witness {
            report.witnesses.push(format!("criterion witness element {w}"));
        }
    }
    if let Some(e) = &coherence.by_extension {
        match e.map() {
            Some(f) => text.push_str(&format!("extension: present, f = {f}\n")),
            None => text.push_str("extension: absent\n"),
        }
        if let cohact_core::coherence::ExtensionVerdict::Absent(w) = e {
            report.witnesses.push(match w {
                ExtensionFailure::Conflict(c) => c.to_string(),
                ExtensionFailure::OutsidePoint { element, class } => {
                    format!("element {element} is sent to the point by s but lies in class {class}")
                }
            });
        }
    }
    if let Some(agree) = coherence.agreement {
        text.push_str(&format!("agreement: {agree}\n"));
    }
    match &ideality.lift {
        Some(l) => text.push_str(&format!("ideal: yes (sigma {:?})\n", l.sigma_case)),
        None => {
            text.push_str("ideal: no\n");
            for t in &ideality.trace {
                text.push_str(&format!("  {t}\n"));
            }
        }
    }
    // a disagreement or a coherent point without a lift is what the tool exists to flag
    report.passed = coherence.agreement != Some(false) && coherent == ideality.ideal();
    report.verdict = text;
    report.data = json!({
        "direction": match point.direction { Direction::Normal => "normal", Direction::Opposite => "opposite" },
        "coherence": coherence,
        "ideality": ideality,
    });
    Ok(())
}
