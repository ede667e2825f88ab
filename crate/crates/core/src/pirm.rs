//! The two parallel iterative regularization methods: implicit (each step
//! solves N regularized subproblems concurrently and averages them) and
//! explicit (one forward evaluation per equation per step), with noisy-data
//! variants.
//!
//! Within a step the N per-equation solves/evaluations are independent rayon
//! tasks joined before averaging; the average is a fixed-index-order sum, so
//! parallel and serial execution produce identical traces. The driver is
//! sequential across n and is the only writer of the trace.

use rayon::prelude::*;
use thiserror::Error;

use crate::inner::{solve_regularized, InnerConfig, InnerError};
use crate::operators::{perturb, GrowthFn, NoiseSpec, OperatorError, OperatorSpec};
use crate::problem::SystemProblem;
use crate::sampling::{fixed_order_mean, mix_seed};
use crate::schedules::{LevelSequence, Schedule, ScheduleError};
use crate::space::{require_finite, Vector};
use crate::trace::{IterationRecord, MethodKind, RunTrace};

#[derive(Debug, Error)]
pub enum PirmError {
    #[error("inner solve failed at iteration {iteration}, equation {equation}: {source}")]
    Inner {
        iteration: usize,
        equation: usize,
        source: InnerError,
        /// Trace of the iterations completed before the failure.
        partial: Box<RunTrace>,
    },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("noise perturbation failed at level {level}, equation {equation}: {source}")]
    Noise {
        level: usize,
        equation: usize,
        source: OperatorError,
    },
}

/// Result of one step: the averaged next iterate, the per-equation
/// sub-iterates, and inner-solver statistics (empty for explicit steps).
#[derive(Debug, Clone)]
pub struct StepResult {
    pub next: Vector,
    pub subs: Vec<Vector>,
    pub inner_iterations: Vec<usize>,
    pub inner_residuals: Vec<f64>,
}

/// Whether the perturbation directions are re-derived at every level
/// (a genuinely level-indexed operator family) or fixed once (one noisy
/// measurement iterated on repeatedly, the natural model for constant noise
/// levels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelSeeding {
    #[default]
    PerLevel,
    Fixed,
}

/// Level-indexed noise model for the noisy implicit method: at level n the
/// exact operators are replaced by seeded perturbations at (h_n, delta_n),
/// derived reproducibly from `base_seed` mixed with the equation index and
/// (under `PerLevel` seeding) the level index.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub h: LevelSequence,
    pub delta: LevelSequence,
    pub growth: GrowthFn,
    pub base_seed: u64,
    pub seeding: LevelSeeding,
}

impl NoiseModel {
    pub fn spec_for(&self, level: usize, equation: usize) -> NoiseSpec {
        let level_key = match self.seeding {
            LevelSeeding::PerLevel => level as u64,
            LevelSeeding::Fixed => 0,
        };
        NoiseSpec {
            h: self.h.value(level),
            delta: self.delta.value(level),
            growth: self.growth,
            seed: mix_seed(self.base_seed, level_key, equation as u64),
        }
    }
}

/// One implicit step: solves A_i(x) + (alpha_n/N + gamma_n) x = gamma_n x_n
/// per equation (concurrently) and averages the solutions in fixed order.
pub fn implicit_step(
    problem: &SystemProblem,
    x_n: &Vector,
    alpha_n: f64,
    gamma_n: f64,
    inner: &InnerConfig,
) -> Result<StepResult, (usize, InnerError)> {
    implicit_step_on(problem.equations(), problem, x_n, alpha_n, gamma_n, inner)
}

fn implicit_step_on(
    equations: &[OperatorSpec],
    problem: &SystemProblem,
    x_n: &Vector,
    alpha_n: f64,
    gamma_n: f64,
    inner: &InnerConfig,
) -> Result<StepResult, (usize, InnerError)> {
    assert!(alpha_n > 0.0 && gamma_n > 0.0, "implicit_step: parameters must be positive");
    let n_eq = equations.len() as f64;
    let c = alpha_n / n_eq + gamma_n;
    let b = gamma_n * x_n;
    let cfg = inner.for_level(alpha_n);
    let solves: Vec<_> = equations
        .par_iter()
        .map(|op| solve_regularized(op, problem.space(), c, &b, &cfg))
        .collect();
    let mut subs = Vec::with_capacity(solves.len());
    let mut iters = Vec::with_capacity(solves.len());
    let mut residuals = Vec::with_capacity(solves.len());
    for (i, s) in solves.into_iter().enumerate() {
        match s {
            Ok(sol) => {
                subs.push(sol.x);
                iters.push(sol.iterations);
                residuals.push(sol.residual);
            }
            Err(e) => return Err((i, e)),
        }
    }
    let next = fixed_order_mean(&subs);
    Ok(StepResult {
        next,
        subs,
        inner_iterations: iters,
        inner_residuals: residuals,
    })
}

/// One explicit step: z_{n,i} = z_n - tau_n (A_i(z_n) + (alpha_n/N) z_n) with
/// tau_n = 1/gamma_n, averaged in fixed order. The N evaluations run
/// concurrently.
pub fn explicit_step(
    problem: &SystemProblem,
    z_n: &Vector,
    alpha_n: f64,
    gamma_n: f64,
) -> StepResult {
    let (result, _) = explicit_step_full(problem, z_n, alpha_n, gamma_n);
    result
}

fn explicit_step_full(
    problem: &SystemProblem,
    z_n: &Vector,
    alpha_n: f64,
    gamma_n: f64,
) -> (StepResult, Vec<Vector>) {
    assert!(
        alpha_n >= 0.0 && gamma_n > 0.0,
        "explicit_step: alpha must be nonnegative and gamma positive"
    );
    let n_eq = problem.n_equations() as f64;
    let tau = 1.0 / gamma_n;
    let evaluations: Vec<Vector> = problem
        .equations()
        .par_iter()
        .map(|op| op.apply(z_n))
        .collect();
    let subs: Vec<Vector> = evaluations
        .iter()
        .map(|a| z_n - tau * (a + (alpha_n / n_eq) * z_n))
        .collect();
    let next = fixed_order_mean(&subs);
    (
        StepResult {
            next,
            subs,
            inner_iterations: Vec::new(),
            inner_residuals: Vec::new(),
        },
        evaluations,
    )
}

/// Deviation between the averaged explicit step and its collapsed one-line
/// form z_{n+1} = z_n - (1/(N gamma_n)) (sum_i A_i(z_n) + alpha_n z_n). The
/// two are algebraically identical; the deviation measures only float
/// reordering and must stay below 1e-13 * scale.
pub fn explicit_collapse_check(
    problem: &SystemProblem,
    z_n: &Vector,
    alpha_n: f64,
    gamma_n: f64,
) -> f64 {
    let (step, evaluations) = explicit_step_full(problem, z_n, alpha_n, gamma_n);
    collapse_deviation(problem, z_n, alpha_n, gamma_n, &step.next, &evaluations)
}

fn collapse_deviation(
    problem: &SystemProblem,
    z_n: &Vector,
    alpha_n: f64,
    gamma_n: f64,
    stepped: &Vector,
    evaluations: &[Vector],
) -> f64 {
    let n_eq = problem.n_equations() as f64;
    let mut sum = evaluations[0].clone();
    for e in &evaluations[1..] {
        sum += e;
    }
    let collapsed = z_n - (sum + alpha_n * z_n) / (n_eq * gamma_n);
    problem.space().norm(&(stepped - &collapsed))
}

fn base_record(problem: &SystemProblem, n: usize, x: &Vector, alpha: f64, gamma: Option<f64>) -> IterationRecord {
    IterationRecord {
        n,
        iterate: x.clone(),
        sub_iterates: Vec::new(),
        alpha,
        gamma,
        residuals: problem.residuals(x),
        error: problem.error_to_known(x),
        inner_iterations: Vec::new(),
        inner_residuals: Vec::new(),
        collapse_deviation: None,
        omega: None,
        envelope_bound: None,
    }
}

/// Runs the implicit method for `n_iters` steps from `x0`, recording the full
/// trace. A failed inner solve aborts the run; the error retains the partial
/// trace.
pub fn run_implicit(
    problem: &SystemProblem,
    alpha: &Schedule,
    gamma: &Schedule,
    x0: &Vector,
    n_iters: usize,
    inner: &InnerConfig,
) -> Result<RunTrace, PirmError> {
    run_implicit_impl(problem, None, alpha, gamma, x0, n_iters, inner)
}

/// Noisy implicit method: level-n perturbed operators per the noise model.
/// With identically zero noise the run reduces bitwise to `run_implicit`.
pub fn run_implicit_noisy(
    problem: &SystemProblem,
    noise: &NoiseModel,
    alpha: &Schedule,
    gamma: &Schedule,
    z0: &Vector,
    n_iters: usize,
    inner: &InnerConfig,
) -> Result<RunTrace, PirmError> {
    run_implicit_impl(problem, Some(noise), alpha, gamma, z0, n_iters, inner)
}

fn run_implicit_impl(
    problem: &SystemProblem,
    noise: Option<&NoiseModel>,
    alpha: &Schedule,
    gamma: &Schedule,
    x0: &Vector,
    n_iters: usize,
    inner: &InnerConfig,
) -> Result<RunTrace, PirmError> {
    assert_eq!(x0.len(), problem.space().dim(), "run_implicit: x0 dimension mismatch");
    require_finite("x0", x0);
    alpha.ensure_horizon(n_iters.saturating_sub(1))?;
    gamma.ensure_horizon(n_iters.saturating_sub(1))?;
    if let Some(nm) = noise {
        nm.h.ensure_horizon(n_iters.saturating_sub(1))?;
        nm.delta.ensure_horizon(n_iters.saturating_sub(1))?;
    }

    let method = if noise.is_some() {
        MethodKind::ImplicitNoisy
    } else {
        MethodKind::Implicit
    };
    let mut trace = RunTrace::new(method, problem.n_equations());
    let mut x = x0.clone();
    trace
        .records
        .push(base_record(problem, 0, &x, alpha.value(0), Some(gamma.value(0))));

    for n in 0..n_iters {
        let a_n = alpha.value(n);
        let g_n = gamma.value(n);
        let perturbed;
        let equations: &[OperatorSpec] = match noise {
            None => problem.equations(),
            Some(nm) => {
                let mut level_ops = Vec::with_capacity(problem.n_equations());
                for (i, op) in problem.equations().iter().enumerate() {
                    let spec = nm.spec_for(n, i);
                    level_ops.push(perturb(op, problem.space(), &spec).map_err(|source| {
                        PirmError::Noise {
                            level: n,
                            equation: i,
                            source,
                        }
                    })?);
                }
                perturbed = level_ops;
                &perturbed
            }
        };
        let step = implicit_step_on(equations, problem, &x, a_n, g_n, inner).map_err(
            |(equation, source)| PirmError::Inner {
                iteration: n,
                equation,
                source,
                partial: Box::new(trace.clone()),
            },
        )?;
        {
            let rec = trace.records.last_mut().expect("record n exists");
            rec.sub_iterates = step.subs;
            rec.inner_iterations = step.inner_iterations;
            rec.inner_residuals = step.inner_residuals;
        }
        x = step.next;
        let next_gamma = Some(gamma.try_value(n + 1).unwrap_or(g_n));
        let next_alpha = alpha.try_value(n + 1).unwrap_or(a_n);
        trace
            .records
            .push(base_record(problem, n + 1, &x, next_alpha, next_gamma));
    }
    Ok(trace)
}

/// Runs the explicit method for `n_iters` steps from `z0`. The collapse
/// deviation is recorded at every step.
pub fn run_explicit(
    problem: &SystemProblem,
    alpha: &Schedule,
    gamma: &Schedule,
    z0: &Vector,
    n_iters: usize,
) -> Result<RunTrace, PirmError> {
    assert_eq!(z0.len(), problem.space().dim(), "run_explicit: z0 dimension mismatch");
    require_finite("z0", z0);
    alpha.ensure_horizon(n_iters.saturating_sub(1))?;
    gamma.ensure_horizon(n_iters.saturating_sub(1))?;

    let mut trace = RunTrace::new(MethodKind::Explicit, problem.n_equations());
    let mut z = z0.clone();
    trace
        .records
        .push(base_record(problem, 0, &z, alpha.value(0), Some(gamma.value(0))));
    for n in 0..n_iters {
        let a_n = alpha.value(n);
        let g_n = gamma.value(n);
        let (step, evaluations) = explicit_step_full(problem, &z, a_n, g_n);
        let deviation = collapse_deviation(problem, &z, a_n, g_n, &step.next, &evaluations);
        {
            let rec = trace.records.last_mut().expect("record n exists");
            rec.sub_iterates = step.subs;
            rec.collapse_deviation = Some(deviation);
        }
        z = step.next;
        let next_gamma = Some(gamma.try_value(n + 1).unwrap_or(g_n));
        let next_alpha = alpha.try_value(n + 1).unwrap_or(a_n);
        trace
            .records
            .push(base_record(problem, n + 1, &z, next_alpha, next_gamma));
    }
    Ok(trace)
}

/// Verdict of the sum-equation equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SumEquivalenceVerdict {
    /// Sum residual was within tolerance and every individual residual is
    /// inside the bound implied by the accretiveness modulus.
    Pass,
    /// Sum residual was small but an individual residual exceeds the bound.
    IndividualExceedsBound,
    /// No claim: the sum residual is above tolerance, or no modulus-based
    /// bound is available for this equation family.
    NotApplicable(String),
}

/// Report of `check_sum_equivalence`.
#[derive(Debug, Clone)]
pub struct SumEquivalenceReport {
    pub sum_residual: f64,
    pub individual_residuals: Vec<f64>,
    pub max_individual: f64,
    /// Individual-residual bound divided by tol, when computable.
    pub kappa: Option<f64>,
    pub verdict: SumEquivalenceVerdict,
}

/// Checks the equivalence of the system with the summed equation at a point:
/// if ||sum_i A_i(y)|| <= tol then each ||A_i(y)|| must stay below
/// phi_R^{-1}(2 R tol) with R = max(||y||, ||x_hat||), which is the
/// quantitative content of the equivalence for inverse uniformly accretive
/// equations (the phi here is the I - T modulus, so the bound is only
/// claimed when every equation is such a residual).
pub fn check_sum_equivalence(
    problem: &SystemProblem,
    y: &Vector,
    tol: f64,
) -> SumEquivalenceReport {
    assert!(tol > 0.0, "check_sum_equivalence: tol must be positive");
    let space = problem.space();
    let sum_residual = space.norm(&problem.sum_operator().apply(y));
    let individual_residuals = problem.residuals(y);
    let max_individual = individual_residuals.iter().cloned().fold(0.0, f64::max);

    if sum_residual > tol {
        return SumEquivalenceReport {
            sum_residual,
            individual_residuals,
            max_individual,
            kappa: None,
            verdict: SumEquivalenceVerdict::NotApplicable(format!(
                "sum residual {sum_residual:.3e} above tol {tol:.1e}; no claim"
            )),
        };
    }

    let all_residual_form = problem.equations().iter().all(is_nonexpansive_residual_shape);
    let radius_anchor = match problem.known_solution() {
        Some(xs) => space.norm(xs),
        None => {
            return SumEquivalenceReport {
                sum_residual,
                individual_residuals,
                max_individual,
                kappa: None,
                verdict: SumEquivalenceVerdict::NotApplicable(
                    "no known solution to anchor the ball radius".into(),
                ),
            }
        }
    };
    if !all_residual_form {
        return SumEquivalenceReport {
            sum_residual,
            individual_residuals,
            max_individual,
            kappa: None,
            verdict: SumEquivalenceVerdict::NotApplicable(
                "phi bound only available for residuals of nonexpansive maps".into(),
            ),
        };
    }

    let r = space.norm(y).max(radius_anchor).max(1e-9);
    let bound = space.phi_inverse_function(r, 2.0 * r * tol);
    let verdict = if max_individual <= bound {
        SumEquivalenceVerdict::Pass
    } else {
        SumEquivalenceVerdict::IndividualExceedsBound
    };
    SumEquivalenceReport {
        sum_residual,
        individual_residuals,
        max_individual,
        kappa: Some(bound / tol),
        verdict,
    }
}

fn is_nonexpansive_residual_shape(op: &OperatorSpec) -> bool {
    match op {
        OperatorSpec::ResidualOfNonexpansive { .. } => true,
        OperatorSpec::AffineResidual { base, .. } => is_nonexpansive_residual_shape(base),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{NonexpansiveMap, OperatorSpec};
    use crate::sampling::{gaussian_vector, rng_from_seed};
    use crate::space::SpaceSpec;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    fn hilbert(d: usize) -> SpaceSpec {
        SpaceSpec::hilbert(d).unwrap()
    }

    fn identity_eq(space: &SpaceSpec) -> OperatorSpec {
        OperatorSpec::residual_of_nonexpansive(NonexpansiveMap::zero(space.dim()), space, 1)
            .unwrap()
    }

    fn zero_eq(space: &SpaceSpec) -> OperatorSpec {
        OperatorSpec::residual_of_nonexpansive(NonexpansiveMap::identity(space.dim()), space, 1)
            .unwrap()
    }

    #[test]
    fn implicit_step_closed_form_for_zero_operators() {
        let space = hilbert(2);
        let problem = SystemProblem::new(
            space,
            vec![zero_eq(&space), zero_eq(&space)],
            None,
            None,
        )
        .unwrap();
        let x = Vector::from_vec(vec![1.0, -2.0]);
        let (a, g) = (0.5, 2.0);
        let step = implicit_step(&problem, &x, a, g, &InnerConfig::default()).unwrap();
        let expected = g / (a / 2.0 + g) * &x;
        assert!((step.next - expected).norm() <= 1e-9);
    }

    #[test]
    fn implicit_step_scalar_identity() {
        let space = hilbert(1);
        let problem = SystemProblem::new(space, vec![identity_eq(&space)], None, None).unwrap();
        let step = implicit_step(
            &problem,
            &Vector::from_vec(vec![1.0]),
            1.0,
            1.0,
            &InnerConfig::default(),
        )
        .unwrap();
        // x + 2x = 1  =>  x = 1/3.
        assert_relative_eq!(step.next[0], 1.0 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn implicit_zero_solution_is_fixed_point() {
        let space = hilbert(2);
        let problem = SystemProblem::new(
            space,
            vec![identity_eq(&space)],
            Some(Vector::zeros(2)),
            None,
        )
        .unwrap();
        let alpha = Schedule::power_alpha(1.0, 0.25).unwrap();
        let gamma = Schedule::power_gamma(1.0, 0.5).unwrap();
        let trace = run_implicit(
            &problem,
            &alpha,
            &gamma,
            &Vector::zeros(2),
            50,
            &InnerConfig::default(),
        )
        .unwrap();
        for rec in &trace.records {
            assert!(rec.error.unwrap() <= 1e-9);
        }
    }

    #[test]
    fn single_step_run_equals_step() {
        let space = hilbert(2);
        let problem =
            SystemProblem::new(space, vec![identity_eq(&space), zero_eq(&space)], None, None)
                .unwrap();
        let alpha = Schedule::power_alpha(1.0, 0.25).unwrap();
        let gamma = Schedule::power_gamma(1.0, 0.5).unwrap();
        let x0 = Vector::from_vec(vec![0.3, 0.7]);
        let cfg = InnerConfig::default();
        let trace = run_implicit(&problem, &alpha, &gamma, &x0, 1, &cfg).unwrap();
        let step = implicit_step(&problem, &x0, alpha.value(0), gamma.value(0), &cfg).unwrap();
        assert_eq!(trace.records.len(), 2);
        assert_eq!(trace.records[1].iterate, step.next);
        assert_eq!(trace.records[0].sub_iterates, step.subs);
    }

    #[test]
    fn explicit_step_closed_forms() {
        let space = hilbert(2);
        // All zero operators: z' = (1 - tau alpha / N) z.
        let problem =
            SystemProblem::new(space, vec![zero_eq(&space), zero_eq(&space)], None, None).unwrap();
        let z = Vector::from_vec(vec![2.0, -4.0]);
        let step = explicit_step(&problem, &z, 0.5, 2.0);
        let expected = (1.0 - 0.5 * 0.5 / 2.0) * &z;
        assert!((step.next - expected).norm() <= 1e-14);

        // Scalar A(z) = z, alpha = 0, gamma = 2: z' = 1 - 0.5 = 0.5.
        let space1 = hilbert(1);
        let problem =
            SystemProblem::new(space1, vec![identity_eq(&space1)], None, None).unwrap();
        let step = explicit_step(&problem, &Vector::from_vec(vec![1.0]), 0.0, 2.0);
        assert_relative_eq!(step.next[0], 0.5, max_relative = 1e-15);
    }

    #[test]
    fn collapse_identity_within_float_reordering() {
        let space = hilbert(5);
        let mut rng = rng_from_seed(3);
        let eqs: Vec<OperatorSpec> = (0..5)
            .map(|i| {
                OperatorSpec::residual_of_nonexpansive(
                    crate::operators::random_linear_contraction(5, 0.9, 40 + i, &space),
                    &space,
                    i,
                )
                .unwrap()
            })
            .collect();
        let problem = SystemProblem::new(space, eqs, None, None).unwrap();
        for _ in 0..20 {
            let z = gaussian_vector(5, &mut rng) * 3.0;
            let dev = explicit_collapse_check(&problem, &z, 0.7, 1.3);
            assert!(dev <= 1e-13 * 1f64.max(space.norm(&z)), "deviation {dev}");
        }
        // Zero input with zero-preserving operators.
        let dev = explicit_collapse_check(&problem, &Vector::zeros(5), 0.7, 1.3);
        assert!(dev <= 1e-15);
    }

    #[test]
    fn explicit_zero_run_has_product_formula() {
        let space = hilbert(1);
        let problem = SystemProblem::new(
            space,
            vec![zero_eq(&space)],
            Some(Vector::zeros(1)),
            None,
        )
        .unwrap();
        let alpha = Schedule::power_alpha(0.5, 0.25).unwrap();
        let gamma = Schedule::power_gamma(1.0, 0.5).unwrap();
        let z0 = Vector::from_vec(vec![1.0]);
        let trace = run_explicit(&problem, &alpha, &gamma, &z0, 30).unwrap();
        let mut product = 1.0;
        for n in 0..30 {
            let tau = 1.0 / gamma.value(n);
            product *= 1.0 - tau * alpha.value(n);
            let z = trace.records[n + 1].iterate[0];
            assert_relative_eq!(z, product, max_relative = 1e-12);
            assert!(z.abs() < trace.records[n].iterate[0].abs());
        }
    }

    #[test]
    fn explicit_zero_iters_keeps_only_initial_record() {
        let space = hilbert(1);
        let problem = SystemProblem::new(space, vec![zero_eq(&space)], None, None).unwrap();
        let alpha = Schedule::power_alpha(1.0, 0.25).unwrap();
        let gamma = Schedule::power_gamma(1.0, 0.5).unwrap();
        let trace =
            run_explicit(&problem, &alpha, &gamma, &Vector::from_vec(vec![2.0]), 0).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.records[0].iterate[0], 2.0);
    }

    #[test]
    fn zero_noise_run_is_bitwise_equal_to_exact() {
        let space = hilbert(3);
        let base = identity_eq(&space);
        let xhat = Vector::from_vec(vec![0.2, -0.4, 0.6]);
        let eq = OperatorSpec::affine_residual(base, xhat.clone()).unwrap();
        let problem = SystemProblem::new(space, vec![eq], Some(xhat), None).unwrap();
        let alpha = Schedule::power_alpha(1.0, 0.25).unwrap();
        let gamma = Schedule::power_gamma(1.0, 0.5).unwrap();
        let z0 = Vector::from_vec(vec![1.0, 1.0, 1.0]);
        let cfg = InnerConfig::default();
        let exact = run_implicit(&problem, &alpha, &gamma, &z0, 25, &cfg).unwrap();
        let noise = NoiseModel {
            h: LevelSequence::zero(),
            delta: LevelSequence::zero(),
            growth: GrowthFn::default(),
            base_seed: 11,
            seeding: LevelSeeding::PerLevel,
        };
        let noisy = run_implicit_noisy(&problem, &noise, &alpha, &gamma, &z0, 25, &cfg).unwrap();
        for (a, b) in exact.records.iter().zip(noisy.records.iter()) {
            assert_eq!(a.iterate, b.iterate);
        }
    }

    #[test]
    fn n_equals_one_reduces_to_single_equation_scheme() {
        let space = hilbert(2);
        let eq = identity_eq(&space);
        let problem = SystemProblem::new(space, vec![eq.clone()], None, None).unwrap();
        let alpha = Schedule::power_alpha(1.0, 0.25).unwrap();
        let gamma = Schedule::power_gamma(1.0, 0.5).unwrap();
        let x0 = Vector::from_vec(vec![1.0, 2.0]);
        let cfg = InnerConfig::default();
        let trace = run_implicit(&problem, &alpha, &gamma, &x0, 20, &cfg).unwrap();

        // Reference single-equation iterative regularization loop.
        let mut x = x0.clone();
        for n in 0..20 {
            let (a, g) = (alpha.value(n), gamma.value(n));
            let sol = solve_regularized(
                &eq,
                problem.space(),
                a / 1.0 + g,
                &(g * &x),
                &cfg.for_level(a),
            )
            .unwrap();
            x = fixed_order_mean(&[sol.x]);
            assert_eq!(trace.records[n + 1].iterate, x, "diverged at step {n}");
        }
    }

    #[test]
    fn permutation_equivariance_of_steps() {
        let space = hilbert(4);
        let eqs: Vec<OperatorSpec> = (0..3)
            .map(|i| {
                OperatorSpec::residual_of_nonexpansive(
                    crate::operators::random_linear_contraction(4, 0.8, 90 + i, &space),
                    &space,
                    i,
                )
                .unwrap()
            })
            .collect();
        let problem = SystemProblem::new(space, eqs, None, None).unwrap();
        let shuffled = problem.permuted(&[2, 0, 1]).unwrap();
        let mut rng = rng_from_seed(6);
        for _ in 0..10 {
            let x = gaussian_vector(4, &mut rng);
            let cfg = InnerConfig::default();
            let s1 = implicit_step(&problem, &x, 0.5, 1.5, &cfg).unwrap();
            let s2 = implicit_step(&shuffled, &x, 0.5, 1.5, &cfg).unwrap();
            assert!((s1.next - s2.next).norm() <= 1e-14 * 1f64.max(space.norm(&x)));
        }
    }

    #[test]
    fn failed_inner_solve_retains_partial_trace() {
        let space = hilbert(1);
        let t = NonexpansiveMap::Linear {
            matrix: nalgebra::dmatrix![0.5],
        };
        let eq = OperatorSpec::residual_of_nonexpansive(t, &space, 1).unwrap();
        let problem = SystemProblem::new(space, vec![eq], None, None).unwrap();
        let alpha = Schedule::power_alpha(1.0, 0.25).unwrap();
        let gamma = Schedule::power_gamma(1.0, 0.5).unwrap();
        let cfg = InnerConfig {
            max_iter: 1,
            tol: 1e-14,
            method: crate::inner::InnerMethod::ContractionFixedPoint,
        };
        let err = run_implicit(
            &problem,
            &alpha,
            &gamma,
            &Vector::from_vec(vec![1.0]),
            5,
            &cfg,
        )
        .unwrap_err();
        match err {
            PirmError::Inner {
                iteration, partial, ..
            } => {
                assert_eq!(iteration, 0);
                assert_eq!(partial.records.len(), 1);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn sum_equivalence_at_known_solution() {
        let space = hilbert(3);
        let xhat = Vector::from_vec(vec![0.5, 0.0, -0.5]);
        let eqs: Vec<OperatorSpec> = (0..2)
            .map(|i| {
                let base = OperatorSpec::residual_of_nonexpansive(
                    crate::operators::random_linear_contraction(3, 0.7, 70 + i, &space),
                    &space,
                    i,
                )
                .unwrap();
                let data = base.apply(&xhat);
                OperatorSpec::affine_residual(base, data).unwrap()
            })
            .collect();
        let problem = SystemProblem::new(space, eqs, Some(xhat.clone()), None).unwrap();
        let report = check_sum_equivalence(&problem, &xhat, 1e-8);
        assert_eq!(report.verdict, SumEquivalenceVerdict::Pass);
        assert!(report.kappa.is_some());

        // Random far point: no claim.
        let far = Vector::from_vec(vec![50.0, -20.0, 10.0]);
        let report = check_sum_equivalence(&problem, &far, 1e-8);
        assert!(matches!(report.verdict, SumEquivalenceVerdict::NotApplicable(_)));
    }
}
