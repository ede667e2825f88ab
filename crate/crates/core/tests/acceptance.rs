//! Acceptance suite: end-to-end checks of every solver family against
//! independent oracles at desk scale, with pinned tolerances and wall-clock
//! budgets. Each criterion prints one pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DVector;

use parreg::diagnostics::{
    fit_rate, min_norm_oracle, monotone_within_ripple, stagnation_floor, regularized_path,
};
use parreg::inner::{solve_regularized, InnerConfig};
use parreg::newton::{
    make_source_anchors, run_newton, run_newton_noisy, stopping_index, NewtonConfig, NewtonError,
    SourceCondition,
};
use parreg::operators::{
    psd_with_spectrum, random_linear_contraction, seeded_orthonormal, standard_catalog, GrowthFn,
    NoiseSpec, OperatorSpec,
};
use parreg::pirm::{run_explicit, run_implicit, run_implicit_noisy, LevelSeeding, NoiseModel};
use parreg::sampling::{fixed_order_mean, gaussian_vector, rng_from_seed, unit_vector};
use parreg::schedules::{validate_noisy_coupling, LevelSequence, Schedule};
use parreg::space::{dual_pair, SpaceSpec, Vector};
use parreg::SystemProblem;

fn check(criterion: &str, pass: bool, detail: &str) {
    println!("{criterion}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion} failed: {detail}");
}

fn check_budget(criterion: &str, elapsed: Duration, budget_s: f64) {
    let secs = elapsed.as_secs_f64();
    check(
        &format!("{criterion} [runtime]"),
        secs < budget_s,
        &format!("{secs:.2}s of {budget_s}s budget"),
    );
}

fn bitwise_eq(a: &Vector, b: &Vector) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
}

// ---------------------------------------------------------------------------
// Shared problems
// ---------------------------------------------------------------------------

/// Hilbert, dim 20, three singular PSD equations sharing an exact
/// 5-dimensional nullspace, consistent data, and the minimum-norm solution
/// known by construction (it lies in the common range).
struct LinearSystemData {
    problem: SystemProblem,
    xhat: Vector,
    x0: Vector,
}

fn build_linear_system(seed: u64, eig_lo: f64, eig_hi: f64, xhat_norm: f64, x0_offset: f64) -> LinearSystemData {
    use rand::Rng;
    let dim = 20;
    let rank = 15;
    let space = SpaceSpec::hilbert(dim).unwrap();
    let basis = seeded_orthonormal(dim, dim, seed);
    let range = basis.columns(0, rank).into_owned();

    let mut rng = rng_from_seed(seed.wrapping_add(1));
    let mut equations = Vec::with_capacity(3);
    let mut matrices = Vec::with_capacity(3);
    for _ in 0..3 {
        let eigs: Vec<f64> = (0..rank)
            .map(|_| eig_lo + (eig_hi - eig_lo) * rng.random::<f64>())
            .collect();
        matrices.push(psd_with_spectrum(&range, &eigs));
    }

    // Solution in the common range, so it is the min-norm solution.
    let combo = DVector::from_iterator(rank, (0..rank).map(|_| rng.random::<f64>() - 0.5));
    let in_range = &range * combo;
    let xhat = &in_range * (xhat_norm / in_range.norm());

    for m in matrices {
        let data = &m * &xhat;
        equations.push(
            OperatorSpec::affine_residual(OperatorSpec::psd_linear(m).unwrap(), data).unwrap(),
        );
    }
    let offset = unit_vector(&space, &mut rng) * x0_offset;
    let x0 = &xhat + offset;
    let problem = SystemProblem::new(space, equations, Some(xhat.clone()), None).unwrap();
    LinearSystemData { problem, xhat, x0 }
}

fn pirm_schedules() -> (Schedule, Schedule) {
    (
        Schedule::power_alpha(1.0, 0.25).unwrap(),
        Schedule::power_gamma(1.0, 0.5).unwrap(),
    )
}

struct ImplicitRunData {
    final_error: f64,
    max_error: f64,
    x0_error: f64,
    xhat_norm: f64,
    tail_ripple_ok: bool,
    oracle_gap: f64,
    elapsed: Duration,
}

fn criterion3_system() -> &'static LinearSystemData {
    static DATA: OnceLock<LinearSystemData> = OnceLock::new();
    DATA.get_or_init(|| build_linear_system(2024, 1.0, 1.5, 0.2, 1.0))
}

fn criterion3_run() -> &'static ImplicitRunData {
    static RUN: OnceLock<ImplicitRunData> = OnceLock::new();
    RUN.get_or_init(|| {
        let data = criterion3_system();
        let (alpha, gamma) = pirm_schedules();
        let start = Instant::now();
        let trace = run_implicit(
            &data.problem,
            &alpha,
            &gamma,
            &data.x0,
            10_000,
            &InnerConfig::default(),
        )
        .expect("implicit run");
        let elapsed = start.elapsed();
        let errors = trace.errors();
        let oracle = min_norm_oracle(&data.problem).expect("pseudoinverse oracle");
        let space = data.problem.space();
        let oracle_gap = space.norm(&(&oracle.xhat - &data.xhat));
        let final_vs_oracle = space.norm(&(trace.final_iterate() - &oracle.xhat));
        ImplicitRunData {
            final_error: final_vs_oracle,
            max_error: errors.iter().cloned().fold(0.0, f64::max),
            x0_error: errors[0],
            xhat_norm: space.norm(&data.xhat),
            tail_ripple_ok: monotone_within_ripple(&errors[errors.len() - 1000..], 0.05),
            oracle_gap,
            elapsed,
        }
    })
}

struct ExplicitRunData {
    final_error: f64,
    max_error: f64,
    x0_error: f64,
    xhat_norm: f64,
    max_collapse_rel: f64,
    elapsed: Duration,
}

fn criterion4_run() -> &'static ExplicitRunData {
    static RUN: OnceLock<ExplicitRunData> = OnceLock::new();
    RUN.get_or_init(|| {
        let data = criterion3_system();
        let (alpha, gamma) = pirm_schedules();
        let start = Instant::now();
        let trace = run_explicit(&data.problem, &alpha, &gamma, &data.x0, 100_000)
            .expect("explicit run");
        let elapsed = start.elapsed();
        let errors = trace.errors();
        let space = data.problem.space();
        let mut max_collapse_rel: f64 = 0.0;
        for rec in &trace.records {
            if let Some(dev) = rec.collapse_deviation {
                let scale = 1f64.max(space.norm(&rec.iterate));
                max_collapse_rel = max_collapse_rel.max(dev / scale);
            }
        }
        ExplicitRunData {
            final_error: *errors.last().unwrap(),
            max_error: errors.iter().cloned().fold(0.0, f64::max),
            x0_error: errors[0],
            xhat_norm: space.norm(&data.xhat),
            max_collapse_rel,
            elapsed,
        }
    })
}

/// Newton system: three full-rank-on-range PSD affine equations (K = 0) with
/// source-condition anchors.
struct NewtonSystemData {
    problem: SystemProblem,
    xhat: Vector,
    x0: Vector,
    source: SourceCondition,
    alpha: Schedule,
}

fn newton_system() -> &'static NewtonSystemData {
    static DATA: OnceLock<NewtonSystemData> = OnceLock::new();
    DATA.get_or_init(|| {
        let base = build_linear_system(4711, 1.0, 2.0, 0.3, 0.3);
        let v: Vec<Vector> = (0..3)
            .map(|i| {
                let mut rng = rng_from_seed(900 + i);
                unit_vector(base.problem.space(), &mut rng) * 0.1
            })
            .collect();
        let source = make_source_anchors(&base.problem, &base.xhat, &v).expect("anchors");
        NewtonSystemData {
            problem: base.problem,
            xhat: base.xhat,
            x0: base.x0,
            source,
            alpha: Schedule::power_alpha(1.0, 0.5).unwrap(),
        }
    })
}

fn newton_config() -> NewtonConfig {
    let data = newton_system();
    NewtonConfig::from_source(data.source.clone(), data.alpha.clone(), 2f64.sqrt())
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_duality_identities() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &p in &[1.5, 2.0, 3.0, 4.0] {
        let space = SpaceSpec::lp(p, 20).unwrap();
        let mut rng = rng_from_seed(10_000 + (p * 10.0) as u64);
        for _ in 0..1000 {
            let x = gaussian_vector(20, &mut rng);
            let j = space.duality_map(&x);
            let n = space.norm(&x);
            let scale = 1f64.max(n * n);
            let pairing_gap = (dual_pair(&x, &j) - n * n).abs() / scale;
            let norm_gap = (space.dual_norm(&j) - n).abs() / scale;
            worst = worst.max(pairing_gap).max(norm_gap);
        }
    }
    check(
        "criterion 01 [duality identities]",
        worst <= 1e-10,
        &format!("worst relative identity gap {worst:.3e} <= 1e-10"),
    );
    check_budget("criterion 01", start.elapsed(), 1.0);
}

#[test]
fn criterion_02_accretiveness_suite() {
    let start = Instant::now();
    let spaces = [
        SpaceSpec::hilbert(20).unwrap(),
        SpaceSpec::lp(3.0, 20).unwrap(),
        SpaceSpec::lp(1.5, 20).unwrap(),
    ];
    let mut n_checked = 0;
    for space in &spaces {
        let catalog = standard_catalog(space, 7);
        for (name, op) in &catalog {
            for seed in [11, 12, 13] {
                let report = op.check_accretive(space, 1000, seed);
                assert!(
                    report.pass,
                    "{name} in {:?}: min pairing {} (scale {})",
                    space.kind(),
                    report.min_pairing,
                    report.scale
                );
                n_checked += 1;
            }
            if matches!(
                op,
                OperatorSpec::ResidualOfNonexpansive { .. } | OperatorSpec::AffineResidual { .. }
            ) {
                for r in [1.0, 5.0, 10.0] {
                    if let Ok(report) = op.check_inverse_uniform_accretive(space, r, 500, 29) {
                        assert!(
                            report.pass,
                            "{name} in {:?} at R={r}: min slack {}",
                            space.kind(),
                            report.min_slack
                        );
                        n_checked += 1;
                    }
                }
            }
        }
    }
    check(
        "criterion 02 [accretiveness suite]",
        n_checked > 0,
        &format!("{n_checked} sampled checks passed"),
    );
    check_budget("criterion 02", start.elapsed(), 5.0);
}

#[test]
fn criterion_03_implicit_convergence() {
    let run = criterion3_run();
    check(
        "criterion 03 [implicit oracle agreement]",
        run.oracle_gap <= 1e-8,
        &format!("constructed vs pseudoinverse solution gap {:.3e}", run.oracle_gap),
    );
    check(
        "criterion 03 [implicit final error]",
        run.final_error <= 1e-2,
        &format!("final error vs oracle {:.4e} <= 1e-2", run.final_error),
    );
    check(
        "criterion 03 [implicit tail ripple]",
        run.tail_ripple_ok,
        "last 1000 errors nonincreasing within 5% ripple",
    );
    check_budget("criterion 03", run.elapsed, 60.0);
}

#[test]
fn criterion_04_explicit_convergence() {
    let run = criterion4_run();
    check(
        "criterion 04 [explicit final error]",
        run.final_error <= 5e-2,
        &format!("final error {:.4e} <= 5e-2", run.final_error),
    );
    check(
        "criterion 04 [collapse identity]",
        run.max_collapse_rel <= 1e-13,
        &format!("max collapse deviation {:.3e} of scale <= 1e-13", run.max_collapse_rel),
    );
    check_budget("criterion 04", run.elapsed, 60.0);
}

#[test]
fn criterion_05_boundedness_invariants() {
    let implicit = criterion3_run();
    let explicit = criterion4_run();
    for (name, run_max, x0_err, xhat) in [
        ("implicit", implicit.max_error, implicit.x0_error, implicit.xhat_norm),
        ("explicit", explicit.max_error, explicit.x0_error, explicit.xhat_norm),
    ] {
        let bound = x0_err.max(xhat) + xhat + 1e-6;
        check(
            &format!("criterion 05 [{name} boundedness]"),
            run_max <= bound,
            &format!("max error {run_max:.4e} <= {bound:.4e}"),
        );
    }
}

#[test]
fn criterion_06_regularized_path_properties() {
    let data = criterion3_system();
    let (alpha, _) = pirm_schedules();
    let alphas: Vec<f64> = (0..=30).map(|n| alpha.value(n)).collect();
    let path = regularized_path(&data.problem, &alphas, &InnerConfig::default()).unwrap();
    let space = data.problem.space();
    let xhat_norm = space.norm(&data.xhat);
    let mut max_norm: f64 = 0.0;
    let mut worst_increment_slack = f64::INFINITY;
    for (i, x) in path.iter().enumerate() {
        max_norm = max_norm.max(space.norm(x));
        if i + 1 < path.len() {
            let inc = space.norm(&(&path[i + 1] - x));
            let bound = 2.0 * xhat_norm * (alphas[i + 1] - alphas[i]).abs() / alphas[i] + 1e-6;
            worst_increment_slack = worst_increment_slack.min(bound - inc);
        }
    }
    check(
        "criterion 06 [path norm bound]",
        max_norm <= 2.0 * xhat_norm + 1e-6,
        &format!("max ||x_alpha|| = {max_norm:.4e} <= {:.4e}", 2.0 * xhat_norm + 1e-6),
    );
    check(
        "criterion 06 [path increment bound]",
        worst_increment_slack >= 0.0,
        &format!("smallest slack in the increment bound {worst_increment_slack:.3e}"),
    );
}

#[test]
fn criterion_07_noisy_implicit() {
    let data = criterion3_system();
    let exact = criterion3_run();
    let (alpha, gamma) = pirm_schedules();

    // Coupled decaying noise h_n = delta_n = (n+1)^-1.
    let decaying = NoiseModel {
        h: LevelSequence::PowerDecay { coefficient: 1.0, exponent: 1.0 },
        delta: LevelSequence::PowerDecay { coefficient: 1.0, exponent: 1.0 },
        growth: GrowthFn::default(),
        base_seed: 404,
        seeding: LevelSeeding::PerLevel,
    };
    let report = validate_noisy_coupling(&alpha, &decaying.h, &decaying.delta, 1000).unwrap();
    assert!(report.verdict.is_satisfied(), "decaying coupling must validate");
    let trace = run_implicit_noisy(
        &data.problem,
        &decaying,
        &alpha,
        &gamma,
        &data.x0,
        10_000,
        &InnerConfig::default(),
    )
    .expect("noisy run");
    let noisy_final = trace.final_error().unwrap();
    check(
        "criterion 07 [noisy final within 3x of exact]",
        noisy_final <= 3.0 * exact.final_error,
        &format!("noisy {noisy_final:.4e} vs 3 * exact {:.4e}", 3.0 * exact.final_error),
    );

    // Constant noise violating the coupling: flagged, and the error floor
    // stays above the noise scale.
    // Constant levels model one fixed noisy measurement, so the
    // perturbation directions stay fixed across levels; per-level re-seeded
    // directions would average out like zero-mean stochastic noise and hide
    // the stagnation this criterion demonstrates.
    let constant = NoiseModel {
        h: LevelSequence::Constant(0.5),
        delta: LevelSequence::Constant(0.5),
        growth: GrowthFn::default(),
        base_seed: 404,
        seeding: LevelSeeding::Fixed,
    };
    let report = validate_noisy_coupling(&alpha, &constant.h, &constant.delta, 1000).unwrap();
    check(
        "criterion 07 [coupling violation flagged]",
        !report.verdict.is_satisfied(),
        "constant h_n = delta_n = 0.5 must violate (h+delta)/alpha -> 0",
    );
    let trace = run_implicit_noisy(
        &data.problem,
        &constant,
        &alpha,
        &gamma,
        &data.x0,
        10_000,
        &InnerConfig::default(),
    )
    .expect("constant-noise run still executes");
    let floor = stagnation_floor(&trace.errors());
    check(
        "criterion 07 [stagnation floor above noise]",
        floor > 0.1,
        &format!("floor {floor:.4e} > 0.1"),
    );
}

#[test]
fn criterion_08_newton_rate() {
    let data = newton_system();
    let cfg = newton_config();
    let start = Instant::now();
    let run = run_newton(&data.problem, &cfg, &data.x0, 200).expect("newton run");
    let elapsed = start.elapsed();

    let gate = run.gate.as_ref().expect("gate computed");
    check(
        "criterion 08 [gate]",
        gate.passes && gate.omega0_admissible == Some(true),
        &format!("b + 2 sqrt(ac) = {:.3e} < 1", gate.b + 2.0 * (gate.a * gate.c).sqrt()),
    );

    let errors = run.trace.errors();
    let alphas = run.trace.alphas();
    let fit = fit_rate(&errors, &alphas, 0.5).expect("rate fit");
    check(
        "criterion 08 [rate slope]",
        (0.85..=1.15).contains(&fit.slope),
        &format!("log-log slope {:.4} in [0.85, 1.15]", fit.slope),
    );

    let mut envelope_ok = true;
    for rec in run.trace.records.iter().skip(1) {
        let (omega, bound) = (rec.omega.unwrap(), rec.envelope_bound.unwrap());
        if omega > bound {
            envelope_ok = false;
            break;
        }
    }
    check(
        "criterion 08 [omega envelope]",
        envelope_ok,
        "omega_{n+1} <= a + b omega_n + c omega_n^2 + slack at every iteration",
    );
    check_budget("criterion 08", elapsed, 10.0);
}

#[test]
fn criterion_09_noisy_newton_rate() {
    let data = newton_system();
    let cfg = newton_config();
    let start = Instant::now();
    let mut finals = Vec::new();
    for delta in [1e-3, 2.5e-4, 6.25e-5] {
        let noise = NoiseSpec::new(0.0, delta, 1234);
        let (run, n_star) =
            run_newton_noisy(&data.problem, &noise, &cfg, &data.x0, 1_000_000).expect("noisy run");
        assert_eq!(run.trace.records.len(), n_star + 1);
        finals.push(run.trace.final_error().unwrap());
    }
    let elapsed = start.elapsed();
    let r1 = finals[0] / finals[1];
    let r2 = finals[1] / finals[2];
    check(
        "criterion 09 [error ratios under delta/4]",
        (1.4..=2.9).contains(&r1) && (1.4..=2.9).contains(&r2),
        &format!(
            "finals {:.3e}/{:.3e}/{:.3e}, ratios {r1:.3} and {r2:.3} in [1.4, 2.9]",
            finals[0], finals[1], finals[2]
        ),
    );
    check_budget("criterion 09", elapsed, 30.0);
}

#[test]
fn criterion_10_stopping_index_exactness() {
    let alpha = Schedule::power_alpha(1.0, 0.5).unwrap();
    let s = stopping_index(0.01, 0.0, 1.0, &alpha, 1_000_000).unwrap();
    check(
        "criterion 10 [exact index]",
        s.index == 99 && !s.clamped,
        &format!("N(0.01, 0) = {} (expected 99)", s.index),
    );

    let alpha4 = Schedule::power_alpha(1.0, 0.25).unwrap();
    let a0sq = alpha4.value(0) * alpha4.value(0);
    let boundary = stopping_index(a0sq, 0.0, 1.0, &alpha4, 100).unwrap();
    check(
        "criterion 10 [boundary]",
        boundary.index == 0,
        &format!("only n = 0 admissible, got {}", boundary.index),
    );

    let empty = stopping_index(2.0 * a0sq, 0.0, 1.0, &alpha4, 100);
    check(
        "criterion 10 [empty set]",
        matches!(empty, Err(NewtonError::NoAdmissibleStoppingIndex { .. })),
        "noise above alpha_0^2 must refuse",
    );

    let clamped = stopping_index(0.0, 0.0, 1.0, &alpha, 777).unwrap();
    check(
        "criterion 10 [zero-noise clamp]",
        clamped.index == 777 && clamped.clamped,
        "zero noise clamps to the cap and flags it",
    );
}

#[test]
fn criterion_11_reductions() {
    // (a) N = 1 implicit trace equals the classical single-equation scheme
    // bitwise.
    let single = build_linear_system(91, 1.0, 2.0, 0.25, 0.8);
    let eq = single.problem.equations()[0].clone();
    let one_problem = SystemProblem::new(
        *single.problem.space(),
        vec![eq.clone()],
        Some(single.xhat.clone()),
        None,
    )
    .unwrap();
    let (alpha, gamma) = pirm_schedules();
    let cfg = InnerConfig::default();
    let trace = run_implicit(&one_problem, &alpha, &gamma, &single.x0, 30, &cfg).unwrap();
    let mut x = single.x0.clone();
    let mut reduction_ok = true;
    for n in 0..30 {
        let (a, g) = (alpha.value(n), gamma.value(n));
        let sol = solve_regularized(&eq, one_problem.space(), a + g, &(g * &x), &cfg.for_level(a))
            .unwrap();
        x = fixed_order_mean(&[sol.x]);
        if !bitwise_eq(&trace.records[n + 1].iterate, &x) {
            reduction_ok = false;
            break;
        }
    }
    check(
        "criterion 11 [N=1 reduction]",
        reduction_ok,
        "single-equation scheme reproduced bitwise",
    );

    // (b) Zero-noise noisy runs equal exact runs bitwise.
    let data = criterion3_system();
    let exact = run_implicit(&data.problem, &alpha, &gamma, &data.x0, 50, &cfg).unwrap();
    let zero_noise = NoiseModel {
        h: LevelSequence::zero(),
        delta: LevelSequence::zero(),
        growth: GrowthFn::default(),
        base_seed: 5,
        seeding: LevelSeeding::PerLevel,
    };
    let noisy =
        run_implicit_noisy(&data.problem, &zero_noise, &alpha, &gamma, &data.x0, 50, &cfg).unwrap();
    let implicit_bitwise = exact
        .records
        .iter()
        .zip(noisy.records.iter())
        .all(|(a, b)| bitwise_eq(&a.iterate, &b.iterate));
    check(
        "criterion 11 [zero-noise implicit]",
        implicit_bitwise,
        "noisy run with h = delta = 0 is bitwise equal to the exact run",
    );

    let ndata = newton_system();
    let ncfg = newton_config();
    let exact_newton = run_newton(&ndata.problem, &ncfg, &ndata.x0, 25).unwrap();
    let (noisy_newton, _) = run_newton_noisy(
        &ndata.problem,
        &NoiseSpec::new(0.0, 0.0, 9),
        &ncfg,
        &ndata.x0,
        25,
    )
    .unwrap();
    let newton_bitwise = exact_newton
        .trace
        .records
        .iter()
        .zip(noisy_newton.trace.records.iter())
        .all(|(a, b)| bitwise_eq(&a.iterate, &b.iterate));
    check(
        "criterion 11 [zero-noise newton]",
        newton_bitwise,
        "noisy Newton with delta = h = 0 matches the exact run up to the cap",
    );

    // (c) Parallel execution equals serial execution bitwise, including the
    // exported CSV bytes.
    let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let parallel_pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let serial = serial_pool
        .install(|| run_implicit(&data.problem, &alpha, &gamma, &data.x0, 100, &cfg))
        .unwrap();
    let parallel = parallel_pool
        .install(|| run_implicit(&data.problem, &alpha, &gamma, &data.x0, 100, &cfg))
        .unwrap();
    let iterates_bitwise = serial
        .records
        .iter()
        .zip(parallel.records.iter())
        .all(|(a, b)| bitwise_eq(&a.iterate, &b.iterate));
    let mut csv_serial = Vec::new();
    let mut csv_parallel = Vec::new();
    serial.write_csv("h", &mut csv_serial).unwrap();
    parallel.write_csv("h", &mut csv_parallel).unwrap();
    check(
        "criterion 11 [parallel determinism]",
        iterates_bitwise && csv_serial == csv_parallel,
        "1-thread and 4-thread runs agree bitwise (trace and CSV bytes)",
    );
}

#[test]
fn criterion_12_sum_equation_equivalence() {
    let dim = 20;
    let space = SpaceSpec::hilbert(dim).unwrap();
    let mut rng = rng_from_seed(606);
    let xhat = unit_vector(&space, &mut rng);
    let equations: Vec<OperatorSpec> = (0..3)
        .map(|i| {
            let base = OperatorSpec::residual_of_nonexpansive(
                random_linear_contraction(dim, 0.9, 800 + i, &space),
                &space,
                i,
            )
            .unwrap();
            let data = base.apply(&xhat);
            OperatorSpec::affine_residual(base, data).unwrap()
        })
        .collect();
    let problem = SystemProblem::new(space, equations, Some(xhat), None).unwrap();

    // Tiny-alpha solve of the summed equation.
    let sum = problem.sum_operator();
    let cfg = InnerConfig {
        tol: 1e-9,
        ..Default::default()
    };
    let y = solve_regularized(&sum, problem.space(), 1e-8, &Vector::zeros(dim), &cfg)
        .expect("tiny-alpha solve")
        .x;
    let max_individual = problem.max_residual(&y);
    check(
        "criterion 12 [individual residuals]",
        max_individual <= 1e-4,
        &format!("max_i ||A_i(y)|| = {max_individual:.3e} <= 1e-4"),
    );

    let report = parreg::pirm::check_sum_equivalence(&problem, &y, 1e-6);
    check(
        "criterion 12 [kappa bound]",
        matches!(report.verdict, parreg::pirm::SumEquivalenceVerdict::Pass),
        &format!(
            "sum residual {:.3e}, kappa {:.3}",
            report.sum_residual,
            report.kappa.unwrap_or(f64::NAN)
        ),
    );
}
