//! Config-driven experiment harness: load a JSON experiment description,
//! run the schedule validators and the selected solver, and write trace and
//! summary artifacts with reproducibility metadata (seeds and content
//! hashes). Identical config + seed produces byte-identical trace CSVs,
//! including under parallel execution.

pub mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagnostics::{fit_rate, min_norm_oracle, stagnation_floor};
use crate::newton::{
    make_source_anchors, run_newton, run_newton_noisy, NewtonConfig, NewtonError, SourceCondition,
};
use crate::operators::NoiseSpec;
use crate::pirm::{run_explicit, run_implicit, run_implicit_noisy, LevelSeeding, NoiseModel, PirmError};
use crate::problem::SystemProblem;
use crate::sampling::{mix_seed, rng_from_seed, unit_vector};
use crate::schedules::{
    validate_explicit, validate_implicit, validate_newton, validate_noisy_coupling,
    LevelSequence, Schedule, ScheduleError, ScheduleReport, Verdict, DEFAULT_HORIZON,
};
use crate::space::Vector;
use crate::trace::RunTrace;

pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config schema violation: {0}")]
    Schema(String),
    #[error("strict mode: validator reported violations: {0:?}")]
    StrictValidation(Vec<String>),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("comparison refused: {0}")]
    CompareMismatch(String),
}

impl HarnessError {
    /// Exit codes: 0 ok, 1 solver failure, 2 config error, 3 strict-validator
    /// failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } | HarnessError::Solver(_) => 1,
            HarnessError::Parse(_) | HarnessError::Schema(_) | HarnessError::CompareMismatch(_) => 2,
            HarnessError::StrictValidation(_) => 3,
        }
    }
}

impl From<ScheduleError> for HarnessError {
    fn from(e: ScheduleError) -> Self {
        HarnessError::Schema(e.to_string())
    }
}

impl From<PirmError> for HarnessError {
    fn from(e: PirmError) -> Self {
        HarnessError::Solver(e.to_string())
    }
}

impl From<NewtonError> for HarnessError {
    fn from(e: NewtonError) -> Self {
        HarnessError::Solver(e.to_string())
    }
}

/// Parses and schema-validates an experiment config file.
pub fn load_config(path: &Path) -> Result<(ExperimentConfig, String), HarnessError> {
    let bytes = fs::read(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let cfg: ExperimentConfig = serde_json::from_slice(&bytes).map_err(|e| {
        HarnessError::Parse(format!(
            "{} (at line {}, column {})",
            e,
            e.line(),
            e.column()
        ))
    })?;
    cfg.check_seed_rule()?;
    let config_hash = hex::encode(Sha256::digest(&bytes));
    Ok((cfg, config_hash))
}

/// Content hash of the problem sections of the config (space + equations +
/// solution data); comparisons refuse traces with different problem hashes.
pub fn problem_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::json!({
        "space": cfg.space,
        "equations": cfg.equations,
        "consistent_with": cfg.consistent_with,
        "known_solution": cfg.known_solution,
        "solution_set": cfg.solution_set.as_ref().map(|s| serde_json::json!({
            "anchor": s.anchor,
            "directions": s.directions,
        })),
    });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    match v {
        Verdict::SatisfiedSymbolically => serde_json::json!("satisfied_symbolically"),
        Verdict::TrendsToZeroNumerically => serde_json::json!("trends_to_zero_numerically"),
        Verdict::Violated {
            first_violating_index,
        } => serde_json::json!({ "violated_at": first_violating_index }),
    }
}

fn reports_json(reports: &[ScheduleReport]) -> serde_json::Value {
    serde_json::Value::Array(
        reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "condition": r.condition,
                    "horizon": r.horizon,
                    "verdict": verdict_json(&r.verdict),
                    "note": r.note,
                    "certified_rho": r.certified_rho,
                    "trace": r.trace,
                })
            })
            .collect(),
    )
}

/// Runs the schedule validators appropriate for the configured method.
pub fn run_validators(
    cfg: &ExperimentConfig,
    problem: &SystemProblem,
    alpha: &Schedule,
    gamma: &Schedule,
) -> Result<Vec<ScheduleReport>, HarnessError> {
    let n_max = cfg.validation.n_max.unwrap_or(DEFAULT_HORIZON);
    let space = problem.space();
    let r = cfg.validation.r.unwrap_or_else(|| {
        problem
            .known_solution()
            .map(|x| 2.0 * space.norm(x).max(1.0))
            .unwrap_or(10.0)
    });
    let d = cfg.validation.d.unwrap_or(0.5);
    let mut reports = match cfg.method {
        config::MethodConfig::Implicit { .. } => validate_implicit(space, alpha, gamma, r, n_max)?,
        config::MethodConfig::Explicit {} => validate_explicit(space, alpha, gamma, d, n_max)?,
        config::MethodConfig::Newton { .. } => vec![validate_newton(alpha, n_max)?],
    };
    if let Some(noise) = &cfg.noise {
        if matches!(cfg.method, config::MethodConfig::Implicit { .. }) {
            let h = noise.h.build()?;
            let delta = noise.delta.build()?;
            reports.push(validate_noisy_coupling(alpha, &h, &delta, n_max)?);
        }
    }
    Ok(reports)
}

fn resolve_x0(cfg: &ExperimentConfig, problem: &SystemProblem) -> Result<Vector, HarnessError> {
    match &cfg.run.x0 {
        Some(v) => {
            if v.len() != problem.space().dim() {
                return Err(HarnessError::Schema("run.x0 has the wrong dimension".into()));
            }
            Ok(Vector::from_vec(v.clone()))
        }
        None => Ok(Vector::zeros(problem.space().dim())),
    }
}

fn constant_level(level: &LevelSequence, what: &str) -> Result<f64, HarnessError> {
    match level {
        LevelSequence::Constant(c) => Ok(*c),
        _ => Err(HarnessError::Schema(format!(
            "{what}: the Newton method uses a fixed noise level; use kind = \"constant\""
        ))),
    }
}

fn resolve_anchors(
    anchors: &config::AnchorsConfig,
    problem: &SystemProblem,
) -> Result<(Vec<Vector>, Option<f64>), HarnessError> {
    let xhat_needed = || -> Result<Vector, HarnessError> {
        if let Some(x) = problem.known_solution() {
            return Ok(x.clone());
        }
        min_norm_oracle(problem)
            .map(|o| o.xhat)
            .map_err(|e| HarnessError::Schema(format!("anchors need a solution estimate: {e}")))
    };
    match anchors {
        config::AnchorsConfig::AtSolution => {
            let xhat = xhat_needed()?;
            let n = problem.n_equations();
            Ok((vec![xhat; n], Some(0.0)))
        }
        config::AnchorsConfig::SourceCondition { v_scale, seed } => {
            let xhat = xhat_needed()?;
            let v: Vec<Vector> = (0..problem.n_equations())
                .map(|i| {
                    let mut rng = rng_from_seed(mix_seed(*seed, 1, i as u64));
                    unit_vector(problem.space(), &mut rng) * *v_scale
                })
                .collect();
            let SourceCondition { anchors, v_norm_sum } =
                make_source_anchors(problem, &xhat, &v).map_err(HarnessError::from)?;
            Ok((anchors, Some(v_norm_sum)))
        }
        config::AnchorsConfig::Explicit { vectors } => {
            if vectors.len() != problem.n_equations() {
                return Err(HarnessError::Schema(format!(
                    "anchors: expected {} vectors, got {}",
                    problem.n_equations(),
                    vectors.len()
                )));
            }
            let anchors = vectors
                .iter()
                .map(|v| Vector::from_vec(v.clone()))
                .collect();
            Ok((anchors, None))
        }
    }
}

struct SolveOutput {
    trace: RunTrace,
    gate: Option<serde_json::Value>,
    n_star: Option<usize>,
}

fn run_solver(
    cfg: &ExperimentConfig,
    problem: &SystemProblem,
    alpha: &Schedule,
    gamma: &Schedule,
    validator_reports: &[ScheduleReport],
) -> Result<SolveOutput, HarnessError> {
    let x0 = resolve_x0(cfg, problem)?;
    match &cfg.method {
        config::MethodConfig::Implicit { inner } => {
            let inner = inner.build()?;
            let n_iters = cfg
                .run
                .n_iters
                .ok_or_else(|| HarnessError::Schema("run.n_iters is required".into()))?;
            let trace = match &cfg.noise {
                None => run_implicit(problem, alpha, gamma, &x0, n_iters, &inner)?,
                Some(noise) => {
                    let constant_levels = matches!(noise.h, config::LevelConfig::Constant { .. })
                        && matches!(noise.delta, config::LevelConfig::Constant { .. });
                    let model = NoiseModel {
                        h: noise.h.build()?,
                        delta: noise.delta.build()?,
                        growth: cfg.build_growth()?,
                        base_seed: cfg.run.seed.expect("seed rule checked at load"),
                        seeding: if constant_levels {
                            LevelSeeding::Fixed
                        } else {
                            LevelSeeding::PerLevel
                        },
                    };
                    run_implicit_noisy(problem, &model, alpha, gamma, &x0, n_iters, &inner)?
                }
            };
            Ok(SolveOutput {
                trace,
                gate: None,
                n_star: None,
            })
        }
        config::MethodConfig::Explicit {} => {
            if cfg.noise.is_some() {
                return Err(HarnessError::Schema(
                    "the explicit method has no noisy variant; drop the noise section".into(),
                ));
            }
            let n_iters = cfg
                .run
                .n_iters
                .ok_or_else(|| HarnessError::Schema("run.n_iters is required".into()))?;
            let trace = run_explicit(problem, alpha, gamma, &x0, n_iters)?;
            Ok(SolveOutput {
                trace,
                gate: None,
                n_star: None,
            })
        }
        config::MethodConfig::Newton { anchors, eta, inner } => {
            let (anchors, v_norm_sum) = resolve_anchors(anchors, problem)?;
            let rho_cert = validator_reports
                .iter()
                .find_map(|r| r.certified_rho)
                .unwrap_or(2.0);
            let ncfg = NewtonConfig {
                anchors,
                v_norm_sum,
                alpha: alpha.clone(),
                rho_cert,
                eta: *eta,
                inner: inner.build()?,
            };
            let (run, n_star) = match &cfg.noise {
                None => {
                    let n_iters = cfg
                        .run
                        .n_iters
                        .ok_or_else(|| HarnessError::Schema("run.n_iters is required".into()))?;
                    (run_newton(problem, &ncfg, &x0, n_iters)?, None)
                }
                Some(noise) => {
                    let h = constant_level(&noise.h.build()?, "noise.h")?;
                    let delta = constant_level(&noise.delta.build()?, "noise.delta")?;
                    let spec = NoiseSpec {
                        h,
                        delta,
                        growth: cfg.build_growth()?,
                        seed: cfg.run.seed.expect("seed rule checked at load"),
                    };
                    let n_cap = cfg.run.n_cap.unwrap_or(1_000_000);
                    let (run, n_star) = run_newton_noisy(problem, &spec, &ncfg, &x0, n_cap)?;
                    (run, Some(n_star))
                }
            };
            let gate = run.gate.as_ref().map(|g| {
                serde_json::json!({
                    "a": g.a, "b": g.b, "c": g.c,
                    "m_plus": g.m_plus, "m_minus": g.m_minus,
                    "passes": g.passes,
                    "omega0": g.omega0,
                    "omega0_admissible": g.omega0_admissible,
                    "k_estimate": run.k_estimate,
                })
            });
            Ok(SolveOutput {
                trace: run.trace,
                gate,
                n_star,
            })
        }
    }
}

/// Outcome of a full `solve` invocation: the summary JSON (also written to
/// disk) and the output directory.
pub struct ExperimentOutcome {
    pub summary: serde_json::Value,
    pub out_dir: PathBuf,
    pub trace_csv: PathBuf,
}

/// Loads, validates, runs, and writes artifacts. `strict_flag` ORs with the
/// config's own strict switch.
pub fn run_experiment(
    config_path: &Path,
    out_override: Option<&Path>,
    strict_flag: bool,
) -> Result<ExperimentOutcome, HarnessError> {
    let started = Instant::now();
    let (cfg, config_hash) = load_config(config_path)?;
    let problem = cfg.build_problem()?;
    let (alpha, gamma) = cfg.build_schedules()?;
    let p_hash = problem_hash(&cfg);

    let reports = run_validators(&cfg, &problem, &alpha, &gamma)?;
    let violated: Vec<String> = reports
        .iter()
        .filter(|r| !r.verdict.is_satisfied())
        .map(|r| r.condition.clone())
        .collect();
    if (strict_flag || cfg.strict) && !violated.is_empty() {
        return Err(HarnessError::StrictValidation(violated));
    }

    let solved = run_solver(&cfg, &problem, &alpha, &gamma, &reports)?;
    let mut trace = solved.trace;

    // Post-hoc errors against the oracle when the problem had no known
    // solution but an oracle route exists.
    let mut notes: Vec<String> = Vec::new();
    if trace.records.iter().all(|r| r.error.is_none()) {
        if let Ok(oracle) = min_norm_oracle(&problem) {
            for rec in &mut trace.records {
                rec.error = Some(problem.space().norm(&(&rec.iterate - &oracle.xhat)));
            }
            notes.push(format!(
                "errors computed post-hoc against the {:?} oracle route",
                oracle.route
            ));
        }
    }

    let errors = trace.errors();
    let alphas = trace.alphas();
    let fit = if errors.len() == trace.records.len() && errors.iter().all(|e| *e > 0.0) {
        fit_rate(&errors, &alphas, 0.5).ok()
    } else {
        None
    };
    let floor = (!errors.is_empty()).then(|| stagnation_floor(&errors));
    let final_residual_max = trace
        .records
        .last()
        .map(|r| r.residuals.iter().cloned().fold(0.0, f64::max));

    let out_dir = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(cfg.output.dir.clone().unwrap_or_else(|| "out".into())));
    fs::create_dir_all(&out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    let formats = cfg
        .output
        .formats
        .clone()
        .unwrap_or_else(|| vec!["csv".into(), "json".into()]);
    let trace_csv = out_dir.join("trace.csv");
    if formats.iter().any(|f| f == "csv") {
        let mut buf = Vec::new();
        trace
            .write_csv(&p_hash, &mut buf)
            .map_err(|source| HarnessError::Io {
                path: trace_csv.display().to_string(),
                source,
            })?;
        write_file(&trace_csv, &buf)?;
    }
    if formats.iter().any(|f| f == "json") {
        let json = trace.to_json(&p_hash);
        write_file(
            &out_dir.join("trace.json"),
            serde_json::to_string_pretty(&json).expect("trace json").as_bytes(),
        )?;
    }
    write_file(
        &out_dir.join("validators.json"),
        serde_json::to_string_pretty(&reports_json(&reports))
            .expect("validator json")
            .as_bytes(),
    )?;

    let mut all_notes = trace.notes.clone();
    all_notes.extend(notes);
    let summary = serde_json::json!({
        "method": trace.method.as_str(),
        "config_hash": config_hash,
        "problem_hash": p_hash,
        "seed": cfg.run.seed,
        "n_iterations": trace.records.len().saturating_sub(1),
        "n_star": solved.n_star,
        "final_error": trace.final_error(),
        "max_error": trace.max_error(),
        "final_residual_max": final_residual_max,
        "fitted_slope": fit.map(|f| f.slope),
        "fit_residual": fit.map(|f| f.residual),
        "stagnation_floor": floor,
        "gate": solved.gate,
        "validators": reports.iter().map(|r| serde_json::json!({
            "condition": r.condition,
            "verdict": verdict_json(&r.verdict),
        })).collect::<Vec<_>>(),
        "wall_time_s": started.elapsed().as_secs_f64(),
        "notes": all_notes,
    });
    write_file(
        &out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary json").as_bytes(),
    )?;

    Ok(ExperimentOutcome {
        summary,
        out_dir: out_dir.clone(),
        trace_csv,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let mut f = fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    f.write_all(bytes).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs only the validators; returns the reports and whether any condition
/// was violated.
pub fn validate_experiment(config_path: &Path) -> Result<(Vec<ScheduleReport>, bool), HarnessError> {
    let (cfg, _) = load_config(config_path)?;
    let problem = cfg.build_problem()?;
    let (alpha, gamma) = cfg.build_schedules()?;
    let reports = run_validators(&cfg, &problem, &alpha, &gamma)?;
    let any_violated = reports.iter().any(|r| !r.verdict.is_satisfied());
    Ok((reports, any_violated))
}

/// Parsed essentials of one trace CSV.
#[derive(Debug, Clone)]
pub struct TraceFileSummary {
    pub path: String,
    pub problem_hash: String,
    pub method: String,
    pub n_star: Option<usize>,
    pub rows: usize,
    pub final_error: Option<f64>,
    pub floor: Option<f64>,
}

/// Comparison across runs of the same problem: final errors, floors, and the
/// ratio of consecutive final errors (the delta-halving experiment).
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub entries: Vec<TraceFileSummary>,
    pub ratios: Vec<Option<f64>>,
}

impl ComparisonReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str("path,method,rows,n_star,final_error,floor,ratio_to_next\n");
        for (i, e) in self.entries.iter().enumerate() {
            let ratio = self
                .ratios
                .get(i)
                .cloned()
                .flatten()
                .map(|r| format!("{r:.4}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.path,
                e.method,
                e.rows,
                e.n_star.map(|n| n.to_string()).unwrap_or_default(),
                e.final_error.map(|v| format!("{v:.6e}")).unwrap_or_default(),
                e.floor.map(|v| format!("{v:.6e}")).unwrap_or_default(),
                ratio,
            ));
        }
        out
    }
}

fn parse_trace_csv(path: &Path) -> Result<TraceFileSummary, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut problem_hash = None;
    let mut method = None;
    let mut n_star = None;
    let mut error_col = None;
    let mut errors: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for line in text.lines() {
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            if let Some((k, v)) = meta.split_once('=') {
                match k.trim() {
                    "problem_hash" => problem_hash = Some(v.trim().to_string()),
                    "method" => method = Some(v.trim().to_string()),
                    "n_star" => n_star = v.trim().parse().ok(),
                    _ => {}
                }
            }
            continue;
        }
        if error_col.is_none() {
            error_col = line.split(',').position(|h| h == "error");
            if error_col.is_none() {
                return Err(HarnessError::CompareMismatch(format!(
                    "{}: header row has no error column",
                    path.display()
                )));
            }
            continue;
        }
        rows += 1;
        if let Some(col) = error_col {
            if let Some(field) = line.split(',').nth(col) {
                if let Ok(v) = field.parse::<f64>() {
                    errors.push(v);
                }
            }
        }
    }
    Ok(TraceFileSummary {
        path: path.display().to_string(),
        problem_hash: problem_hash.ok_or_else(|| {
            HarnessError::CompareMismatch(format!("{}: missing problem_hash", path.display()))
        })?,
        method: method.unwrap_or_else(|| "unknown".into()),
        n_star,
        rows,
        final_error: errors.last().cloned(),
        floor: (!errors.is_empty()).then(|| stagnation_floor(&errors)),
    })
}

/// Compares two or more traces of the same problem.
pub fn compare_runs(paths: &[PathBuf]) -> Result<ComparisonReport, HarnessError> {
    if paths.len() < 2 {
        return Err(HarnessError::CompareMismatch(
            "need at least two traces to compare".into(),
        ));
    }
    let entries: Vec<TraceFileSummary> = paths
        .iter()
        .map(|p| parse_trace_csv(p))
        .collect::<Result<_, _>>()?;
    let first_hash = &entries[0].problem_hash;
    for e in &entries[1..] {
        if &e.problem_hash != first_hash {
            return Err(HarnessError::CompareMismatch(format!(
                "problem hash mismatch: {} has {}, {} has {}",
                entries[0].path, first_hash, e.path, e.problem_hash
            )));
        }
    }
    let ratios: Vec<Option<f64>> = entries
        .windows(2)
        .map(|w| match (w[0].final_error, w[1].final_error) {
            (Some(a), Some(b)) if b != 0.0 => Some(a / b),
            _ => None,
        })
        .collect();
    Ok(ComparisonReport { entries, ratios })
}

pub mod cli {
    //! Command-line front end: `solve`, `validate`, `compare`.

    use std::ffi::OsString;
    use std::path::PathBuf;

    use clap::{Parser, Subcommand};

    use super::*;

    #[derive(Parser)]
    #[command(
        name = "parreg",
        about = "Parallel regularization methods for systems of accretive operator equations"
    )]
    struct Cli {
        #[command(subcommand)]
        cmd: Cmd,
    }

    #[derive(Subcommand)]
    enum Cmd {
        /// Run the experiment described by a JSON config.
        Solve {
            config: PathBuf,
            /// Output directory (overrides the config).
            #[arg(long)]
            out: Option<PathBuf>,
            /// Fail (exit 3) if any schedule validator reports a violation.
            #[arg(long)]
            strict: bool,
            /// Size of the worker pool for per-equation parallelism.
            #[arg(long)]
            threads: Option<usize>,
        },
        /// Run only the schedule validators and print the verdicts.
        Validate { config: PathBuf },
        /// Compare trace CSVs of the same problem (final errors, floors,
        /// consecutive error ratios).
        Compare {
            #[arg(required = true, num_args = 2..)]
            traces: Vec<PathBuf>,
        },
    }

    /// Entry point used by the binary; returns the process exit code.
    pub fn run<I, T>(args: I) -> i32
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = match Cli::try_parse_from(args) {
            Ok(c) => c,
            Err(e) => {
                let _ = e.print();
                return 2;
            }
        };
        match cli.cmd {
            Cmd::Solve {
                config,
                out,
                strict,
                threads,
            } => {
                if let Some(n) = threads {
                    // A pool may already exist in-process (tests); that is fine.
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
                match run_experiment(&config, out.as_deref(), strict) {
                    Ok(outcome) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&outcome.summary).expect("summary")
                        );
                        0
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        e.exit_code()
                    }
                }
            }
            Cmd::Validate { config } => match validate_experiment(&config) {
                Ok((reports, any_violated)) => {
                    for r in &reports {
                        let verdict = match &r.verdict {
                            Verdict::SatisfiedSymbolically => "satisfied (symbolic)".to_string(),
                            Verdict::TrendsToZeroNumerically => {
                                "satisfied (numeric trend)".to_string()
                            }
                            Verdict::Violated {
                                first_violating_index,
                            } => format!("VIOLATED at n={first_violating_index}"),
                        };
                        println!("{}: {}", r.condition, verdict);
                    }
                    if any_violated {
                        3
                    } else {
                        0
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            },
            Cmd::Compare { traces } => match compare_runs(&traces) {
                Ok(report) => {
                    print!("{}", report.render_table());
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            },
        }
    }
}
