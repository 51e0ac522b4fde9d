//! `triform` command-line front end.
//!
//! Every subcommand writes one JSON [`RunReport`] to standard output.
//! Exit codes: 0 all checks passed, 1 some mathematical check failed,
//! 2 invalid input (parse error, dimension mismatch, degenerate request).

pub mod instance;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::axioms::check_axioms;
use crate::batch::{run_classical, run_sweep, SweepConfig, SweepWeights};
use crate::classical::{classical_verify, COMMUTATOR_NOTE};
use crate::error::Error;
use crate::operator::{check_3_self_adjoint, default_adjoint_tolerance, LinearOperator};
use crate::sharpness::{optimize_joint, optimize_state, SharpnessResult};
use crate::tolerance::Tolerance;
use crate::uncertainty::{operator_order_invariance, verify_chain};

pub use instance::InstanceFile;
pub use report::{CheckResult, Counts, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "triform",
    version,
    about = "3-product uncertainty bounds: verification and sharpness search"
)]
struct Cli {
    /// Include wall-clock time in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct TolArgs {
    #[arg(long = "tol-abs")]
    tol_abs: Option<f64>,
    #[arg(long = "tol-rel")]
    tol_rel: Option<f64>,
}

impl TolArgs {
    fn apply(&self, mut base: Tolerance) -> Result<Tolerance, String> {
        if let Some(a) = self.tol_abs {
            base.absolute = a;
        }
        if let Some(r) = self.tol_rel {
            base.relative = r;
        }
        if base.is_valid() {
            Ok(base)
        } else {
            Err("tolerances must be finite and nonnegative".into())
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightsArg {
    Unit,
    Random,
    Mixed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample-check the four 3-product axioms on the file's space.
    Axioms {
        #[arg(long)]
        file: PathBuf,
        /// Number of sampled triples.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check every operator in the file for 3-self-adjointness.
    Selfadjoint {
        #[arg(long)]
        file: PathBuf,
    },
    /// Evaluate the full inequality chain for one instance.
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Verify the chain on many seeded random diagonal instances.
    Sweep {
        #[arg(long, value_parser = parse_dims, default_value = "2..16")]
        dims: (usize, usize),
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "mixed")]
        weights: WeightsArg,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        low: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        high: f64,
        /// Per-instance summary: id, margin, tight flag.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Per-instance chain reports, one JSON object per line.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Search for the sharpest instances (state-only or joint).
    Optimize {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Per-restart best ratios.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Two-operator Robertson/Schrödinger reference checks on Euclidean R^n.
    Classical {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_parser = parse_dims, default_value = "2..8")]
        dims: (usize, usize),
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tol: TolArgs,
    },
}

/// `LO..HI`, inclusive on both ends; a single `N` means `N..N`.
fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: usize = lo
        .parse()
        .map_err(|_| format!("bad lower dimension in `{s}`"))?;
    let hi: usize = hi
        .parse()
        .map_err(|_| format!("bad upper dimension in `{s}`"))?;
    if lo == 0 || hi < lo {
        return Err(format!("dimension range `{s}` must satisfy 1 <= LO <= HI"));
    }
    Ok((lo, hi))
}

/// Invalid input; becomes exit code 2.
struct InputError(String);

impl From<String> for InputError {
    fn from(s: String) -> Self {
        InputError(s)
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<RunReport, InputError>;

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_OK
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let started = Instant::now();
    let result = match &cli.command {
        Command::Axioms {
            file,
            count,
            seed,
            tol,
        } => cmd_axioms(file, *count, *seed, tol),
        Command::Selfadjoint { file } => cmd_selfadjoint(file, err),
        Command::Verify { file, tol } => cmd_verify(file, tol),
        Command::Sweep {
            dims,
            count,
            seed,
            weights,
            low,
            high,
            csv,
            jsonl,
            tol,
        } => cmd_sweep(
            *dims,
            *count,
            *seed,
            *weights,
            (*low, *high),
            csv.as_deref(),
            jsonl.as_deref(),
            tol,
        ),
        Command::Optimize {
            file,
            restarts,
            seed,
            csv,
        } => cmd_optimize(file, *restarts, *seed, csv.as_deref()),
        Command::Classical {
            file,
            dims,
            count,
            seed,
            tol,
        } => cmd_classical(file.as_deref(), *dims, *count, *seed, tol),
    };
    match result {
        Ok(mut report) => {
            if cli.timing {
                report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            if writeln!(out, "{text}").is_err() {
                return EXIT_INVALID_INPUT;
            }
            if report.all_passed() {
                EXIT_OK
            } else {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    let _ = writeln!(err, "check failed: {}", c.name);
                }
                EXIT_CHECK_FAILED
            }
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID_INPUT
        }
    }
}

fn load(path: &Path) -> Result<(InstanceFile, String), InputError> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let text =
        std::str::from_utf8(&bytes).map_err(|e| format!("{} is not UTF-8: {e}", path.display()))?;
    let file = instance::parse(text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((file, report::digest(&bytes)))
}

fn cmd_axioms(path: &Path, count: usize, seed: Option<u64>, tol: &TolArgs) -> CmdResult {
    let (file, digest) = load(path)?;
    let resolved = file.resolve()?;
    let tolerance = tol.apply(resolved.tolerance)?;
    let seed = seed.or(resolved.seed).unwrap_or(0);
    let r = check_axioms(&resolved.space, count, seed, &tolerance);
    let mut report = RunReport::new("axioms", digest);
    report.push("symmetry", r.symmetry.passed, &r.symmetry);
    report.push("homogeneity", r.homogeneity.passed, &r.homogeneity);
    report.push("additivity", r.additivity.passed, &r.additivity);
    report.push("holder", r.holder.passed, &r.holder);
    report.push(
        "sampling",
        true,
        serde_json::json!({"label": r.label, "samples": r.samples, "seed": r.seed, "vacuous": r.vacuous}),
    );
    report.count_checks();
    if !r.vacuous {
        report.note_margin(-r.holder.worst_deviation);
    }
    Ok(report)
}

fn cmd_selfadjoint(path: &Path, err: &mut dyn Write) -> CmdResult {
    let (file, digest) = load(path)?;
    let resolved = file.resolve()?;
    if resolved.operators.is_empty() {
        return Err(InputError(
            "at `operators`: at least one operator is required".into(),
        ));
    }
    let mut report = RunReport::new("selfadjoint", digest);
    for (k, op) in resolved.operators.iter().enumerate() {
        let check = check_3_self_adjoint(
            &resolved.space,
            op,
            default_adjoint_tolerance(&resolved.space, op),
        )?;
        if let Some(w) = &check.witness {
            let _ = writeln!(err, "operator {k} is not 3-self-adjoint: witness {w}");
            report.note_margin(-w.discrepancy);
        }
        report.push(&format!("operator_{k}"), check.passed, &check);
    }
    report.count_checks();
    Ok(report)
}

fn cmd_verify(path: &Path, tol: &TolArgs) -> CmdResult {
    let (file, digest) = load(path)?;
    let resolved = file.resolve()?;
    let tolerance = tol.apply(resolved.tolerance)?;
    let [a, b, c] = resolved.three_operators()?;
    let x = resolved.normalized_state()?;
    let space = &resolved.space;

    let mut report = RunReport::new("verify", digest);
    let mut adjoint_ok = true;
    for (name, op) in ["self_adjoint_a", "self_adjoint_b", "self_adjoint_c"]
        .into_iter()
        .zip([a, b, c])
    {
        let check = check_3_self_adjoint(space, op, default_adjoint_tolerance(space, op))?;
        adjoint_ok &= check.passed;
        report.push(name, check.passed, &check);
    }
    if adjoint_ok {
        let chain = verify_chain(space, a, b, c, &x, &tolerance)?;
        let order = operator_order_invariance(space, a, b, c, &x, &tolerance)?;
        report.note_margin(chain.margin);
        if chain.degenerate_tight {
            report.counts.degenerate_tight = 1;
        }
        report.push(
            "state",
            true,
            serde_json::json!({"coords": x.coords(), "cube_sum": x.cube_sum()}),
        );
        report.push("chain", chain.chain_ok, &chain);
        report.push(
            "identity",
            chain.identity_ok,
            serde_json::json!({"identity_deviation": chain.identity_deviation, "scale": chain.scale}),
        );
        report.push("order_invariance", order.passed, &order);
    }
    let degenerate = report.counts.degenerate_tight;
    report.count_checks();
    report.counts.degenerate_tight = degenerate;
    Ok(report)
}

#[derive(Serialize)]
struct Aggregate {
    failures: usize,
    worst: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    dims: (usize, usize),
    count: usize,
    seed: Option<u64>,
    weights: WeightsArg,
    bounds: (f64, f64),
    csv_path: Option<&Path>,
    jsonl_path: Option<&Path>,
    tol: &TolArgs,
) -> CmdResult {
    let seed = seed.ok_or_else(|| "sweep needs an explicit --seed".to_string())?;
    let config = SweepConfig {
        dims,
        count,
        seed,
        weights: match weights {
            WeightsArg::Unit => SweepWeights::Unit,
            WeightsArg::Random => SweepWeights::Random,
            WeightsArg::Mixed => SweepWeights::Mixed,
        },
        low: bounds.0,
        high: bounds.1,
        tolerance: tol.apply(Tolerance::default())?,
    };
    let records = run_sweep(&config)?;

    let canonical = serde_json::to_string(&config).expect("config serializes");
    let mut report = RunReport::new("sweep", report::digest(canonical.as_bytes()));
    let mut chain = Aggregate {
        failures: 0,
        worst: f64::INFINITY,
    };
    let mut identity = Aggregate {
        failures: 0,
        worst: 0.0,
    };
    let mut order = Aggregate {
        failures: 0,
        worst: 0.0,
    };
    for r in &records {
        if !r.chain.chain_ok {
            chain.failures += 1;
        }
        chain.worst = chain.worst.min(r.chain.margin);
        if !r.chain.identity_ok {
            identity.failures += 1;
        }
        identity.worst = identity
            .worst
            .max(r.chain.identity_deviation / r.chain.scale);
        if !r.order.passed {
            order.failures += 1;
        }
        order.worst = order.worst.max(r.order.max_deviation / r.order.scale);

        if !r.passed() {
            report.counts.fail += 1;
        } else if r.chain.degenerate_tight {
            report.counts.degenerate_tight += 1;
        } else {
            report.counts.pass += 1;
        }
        report.note_margin(r.chain.margin);
    }
    if records.is_empty() {
        chain.worst = 0.0;
    }
    report.push("chain", chain.failures == 0, &chain);
    report.push("identity", identity.failures == 0, &identity);
    report.push("order_invariance", order.failures == 0, &order);
    report.push(
        "summary",
        true,
        serde_json::json!({
            "instances": records.len(),
            "dims": [dims.0, dims.1],
            "seed": seed,
            "degenerate_tight_fraction": if records.is_empty() { 0.0 } else {
                report.counts.degenerate_tight as f64 / records.len() as f64
            },
        }),
    );

    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        w.write_record(["instance", "margin", "tight"])
            .map_err(|e| e.to_string())?;
        for r in &records {
            w.write_record([
                r.id.to_string(),
                r.chain.margin.to_string(),
                r.chain.degenerate_tight.to_string(),
            ])
            .map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    if let Some(path) = jsonl_path {
        let mut text = String::new();
        for r in &records {
            text.push_str(&serde_json::to_string(r).expect("record serializes"));
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(report)
}

fn cmd_optimize(
    path: &Path,
    restarts: Option<usize>,
    seed: Option<u64>,
    csv_path: Option<&Path>,
) -> CmdResult {
    let (file, digest) = load(path)?;
    let resolved = file.resolve()?;
    let seed = seed
        .or(resolved.seed)
        .ok_or_else(|| "optimize needs a `seed` in the file (or --seed)".to_string())?;
    let spec = file.optimize.clone().unwrap_or(instance::OptimizeSpec {
        mode: instance::OptimizeMode::State,
        low: None,
        high: None,
        restarts: None,
        max_iterations: None,
        initial_step: None,
        shrink: None,
        convergence: None,
        delta_floor: None,
    });
    let mut config = spec.config(seed);
    if let Some(r) = restarts {
        config.restarts = r;
    }
    let space = &resolved.space;
    let result: SharpnessResult = match spec.mode {
        instance::OptimizeMode::State => {
            let [a, b, c] = resolved.three_operators()?;
            optimize_state(space, a, b, c, &config)?
        }
        instance::OptimizeMode::Joint => optimize_joint(
            space,
            spec.low.unwrap_or(-2.0),
            spec.high.unwrap_or(2.0),
            &config,
        )?,
    };

    let [a, b, c] = result.best_operators.clone().map(LinearOperator::diagonal);
    let x = space.state(result.best_state.clone())?;
    let chain = verify_chain(space, &a, &b, &c, &x, &resolved.tolerance)?;
    let reevaluated = chain.rhs_expanded / chain.lhs_product;
    let reproduces = (reevaluated - result.best_ratio).abs() <= 1e-9 && chain.chain_ok;

    let mut report = RunReport::new("optimize", digest);
    report.note_margin(chain.margin);
    report.push("search", true, &result);
    report.push(
        "falsification",
        !result.falsification_flag,
        serde_json::json!({"max_ratio_seen": result.max_ratio_seen}),
    );
    report.push(
        "witness_reproduces",
        reproduces,
        serde_json::json!({"reevaluated_ratio": reevaluated, "chain": chain}),
    );
    report.push(
        "cross_check",
        result.cross_check_failures == 0,
        serde_json::json!({"cross_check_failures": result.cross_check_failures}),
    );
    report.count_checks();

    if let (Some(path), Some(trace)) = (csv_path, &result.ratio_trace) {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        w.write_record(["restart", "best_ratio"])
            .map_err(|e| e.to_string())?;
        for (i, r) in trace.iter().enumerate() {
            let v = r.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([i.to_string(), v])
                .map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    Ok(report)
}

fn cmd_classical(
    path: Option<&Path>,
    dims: (usize, usize),
    count: usize,
    seed: Option<u64>,
    tol: &TolArgs,
) -> CmdResult {
    let (reports, digest) = match path {
        Some(path) => {
            let (file, digest) = load(path)?;
            let resolved = file.resolve()?;
            let tolerance = tol.apply(resolved.tolerance)?;
            let [a, b] = match resolved.operators.as_slice() {
                [a, b] => [a, b],
                other => {
                    return Err(InputError(format!(
                        "at `operators`: classical needs exactly 2 symmetric operators, found {}",
                        other.len()
                    )))
                }
            };
            let h = resolved
                .coords
                .clone()
                .ok_or("at `state`: a unit vector h is required".to_string())?;
            (vec![classical_verify(a, b, &h, &tolerance)?], digest)
        }
        None => {
            let seed = seed
                .ok_or_else(|| "classical without --file needs an explicit --seed".to_string())?;
            let tolerance = tol.apply(Tolerance::default())?;
            let canonical = format!(
                "classical dims={}..{} count={count} seed={seed} tol={:?}",
                dims.0, dims.1, tolerance
            );
            let records = run_classical(dims, count, seed, &tolerance)?;
            (
                records.into_iter().map(|r| r.report).collect(),
                report::digest(canonical.as_bytes()),
            )
        }
    };

    let mut report = RunReport::new("classical", digest);
    let count_failures = |f: &dyn Fn(&crate::classical::ClassicalReport) -> bool| {
        reports.iter().filter(|r| !f(r)).count()
    };
    let delta = count_failures(&|r| r.delta_a.agree && r.delta_b.agree);
    let robertson = count_failures(&|r| r.robertson_links.iter().all(|l| *l));
    let schrodinger = count_failures(&|r| r.schrodinger_ok);
    let dominates = count_failures(&|r| r.schrodinger_dominates_robertson);
    let commutator = count_failures(&|r| r.commutator_vanishes);
    let identity = count_failures(&|r| r.schrodinger_identity_ok);
    let max_commutator = reports
        .iter()
        .map(|r| r.commutator_expectation.abs())
        .fold(0.0, f64::max);
    for r in &reports {
        report.note_margin(r.product - r.schrodinger_rhs);
        if r.passed() {
            report.counts.pass += 1;
        } else {
            report.counts.fail += 1;
        }
    }
    report.push(
        "delta_forms_agree",
        delta == 0,
        serde_json::json!({"failures": delta}),
    );
    report.push(
        "robertson_chain",
        robertson == 0,
        serde_json::json!({"failures": robertson}),
    );
    report.push(
        "schrodinger_bound",
        schrodinger == 0,
        serde_json::json!({"failures": schrodinger}),
    );
    report.push(
        "schrodinger_identity",
        identity == 0,
        serde_json::json!({"failures": identity}),
    );
    report.push(
        "schrodinger_dominates_robertson",
        dominates == 0,
        serde_json::json!({"failures": dominates}),
    );
    report.push(
        "commutator_vanishes",
        commutator == 0,
        serde_json::json!({"failures": commutator, "max_abs_expectation": max_commutator, "note": COMMUTATOR_NOTE}),
    );
    if reports.len() == 1 {
        report.push("instance", reports[0].passed(), &reports[0]);
    }
    Ok(report)
}
