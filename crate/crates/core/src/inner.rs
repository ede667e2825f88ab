//! Inner solvers: the resolvent-type solve A(x) + c x = b required by each
//! implicit step, and the shifted linear solve (alpha I + L)^-1 r required by
//! Newton steps.
//!
//! Both are pure; each per-equation solve runs independently. The regularized
//! problem is well posed for accretive A and c > 0, with the stability bound
//! ||x_1 - x_2|| <= ||b_1 - b_2|| / c, which is also what makes converged
//! solutions of the same problem agree to 2 tol / c.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::operators::{OperatorError, OperatorSpec};
use crate::space::{SpaceSpec, Vector};

#[derive(Debug, Error)]
pub enum InnerError {
    #[error("inner solve did not converge within {iterations} iterations; last residual {residual:.3e} (tol {tol:.1e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },
    #[error("damped Newton stalled at residual {residual:.3e} after exhausting step halvings")]
    LineSearchStalled { residual: f64 },
    #[error("shifted linear system is numerically singular")]
    SingularSystem,
    #[error("solution violates the resolvent bound ||s|| <= ||r||/alpha: {norm:.3e} > {bound:.3e}; the map is not accretive")]
    ResolventBoundViolated { norm: f64, bound: f64 },
    #[error("no applicable inner method for operator variant {0}")]
    NoApplicableMethod(&'static str),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Inner method selection. `Auto` picks per the operator structure:
/// contraction for residuals of nonexpansive maps, a direct factorization for
/// affine-linear operators, damped Newton otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerMethod {
    #[default]
    Auto,
    ContractionFixedPoint,
    DampedNewton,
    DirectLinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    /// Residual norm tolerance: a returned solution satisfies
    /// ||A(x) + c x - b|| <= tol in the space norm.
    pub tol: f64,
    pub max_iter: usize,
    pub method: InnerMethod,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig {
            tol: 1e-10,
            max_iter: 200_000,
            method: InnerMethod::Auto,
        }
    }
}

impl InnerConfig {
    /// Tolerance coupling used by the outer methods: tol_n = min(tol, 1e-10,
    /// alpha_n^2 * 1e-3) keeps the inner error asymptotically negligible
    /// against the regularization level.
    pub fn for_level(&self, alpha: f64) -> InnerConfig {
        InnerConfig {
            tol: self.tol.min(1e-10).min(alpha * alpha * 1e-3),
            ..*self
        }
    }
}

/// A converged inner solve.
#[derive(Debug, Clone)]
pub struct InnerSolve {
    pub x: Vector,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves A(x) + c x = b to the configured residual tolerance.
pub fn solve_regularized(
    op: &OperatorSpec,
    space: &SpaceSpec,
    c: f64,
    b: &Vector,
    cfg: &InnerConfig,
) -> Result<InnerSolve, InnerError> {
    assert!(c > 0.0, "solve_regularized: regularization constant must be positive, got {c}");
    assert!(cfg.tol > 0.0 && cfg.max_iter >= 1, "solve_regularized: invalid inner config");
    assert_eq!(b.len(), op.dim(), "solve_regularized: right-hand side dimension mismatch");

    match cfg.method {
        InnerMethod::ContractionFixedPoint => contraction_solve(op, space, c, b, cfg),
        InnerMethod::DirectLinear => direct_solve(op, space, c, b, cfg),
        InnerMethod::DampedNewton => newton_solve(op, space, c, b, cfg),
        InnerMethod::Auto => {
            let lambda = op.identity_coefficient();
            let contraction_feasible = match op.residual_lipschitz(space) {
                Some(lip) if lambda + c > 0.0 => {
                    let q = lip / (lambda + c);
                    // Enough contraction to finish inside the iteration budget.
                    q < 1.0 && estimate_iterations(q, cfg.tol) <= cfg.max_iter
                }
                _ => false,
            };
            if is_psd_rooted(op) {
                direct_solve(op, space, c, b, cfg)
            } else if contraction_feasible && lambda > 0.0 {
                contraction_solve(op, space, c, b, cfg)
            } else if op.linear_part().is_some() {
                direct_solve(op, space, c, b, cfg)
            } else if op.supports_derivative() {
                newton_solve(op, space, c, b, cfg)
            } else if contraction_feasible {
                contraction_solve(op, space, c, b, cfg)
            } else {
                Err(InnerError::NoApplicableMethod(op.variant_name()))
            }
        }
    }
}

fn is_psd_rooted(op: &OperatorSpec) -> bool {
    match op {
        OperatorSpec::PsdLinear { .. } => true,
        OperatorSpec::AffineResidual { base, .. } => is_psd_rooted(base),
        _ => false,
    }
}

fn estimate_iterations(q: f64, tol: f64) -> usize {
    // Starting residual scale is unknown here; assume a 1e4 spread.
    let reduction = (tol / 1e4).ln() / q.ln();
    if reduction.is_finite() && reduction > 0.0 {
        reduction.ceil() as usize
    } else {
        1
    }
}

fn regularized_residual(op: &OperatorSpec, space: &SpaceSpec, c: f64, b: &Vector, x: &Vector) -> f64 {
    space.norm(&(op.apply(x) + c * x - b))
}

/// Fixed-point iteration x <- (b - N(x)) / (lambda + c) where
/// A(x) = lambda x + N(x). For A = I - T this is x <- (b + T(x)) / (1 + c)
/// with contraction factor 1 / (1 + c).
fn contraction_solve(
    op: &OperatorSpec,
    space: &SpaceSpec,
    c: f64,
    b: &Vector,
    cfg: &InnerConfig,
) -> Result<InnerSolve, InnerError> {
    let lambda = op.identity_coefficient();
    let denom = lambda + c;
    let mut x = b / denom;
    let mut residual = regularized_residual(op, space, c, b, &x);
    let mut iterations = 0;
    while residual > cfg.tol {
        if iterations >= cfg.max_iter {
            return Err(InnerError::NonConvergence {
                iterations,
                residual,
                tol: cfg.tol,
            });
        }
        let n_x = op.apply(&x) - lambda * &x;
        x = (b - n_x) / denom;
        residual = regularized_residual(op, space, c, b, &x);
        iterations += 1;
    }
    Ok(InnerSolve {
        x,
        residual,
        iterations,
    })
}

/// Direct factorization solve of (L + c I) x = b - k for affine A(x) = L x + k.
fn direct_solve(
    op: &OperatorSpec,
    space: &SpaceSpec,
    c: f64,
    b: &Vector,
    cfg: &InnerConfig,
) -> Result<InnerSolve, InnerError> {
    let Some((l, k)) = op.linear_part() else {
        return Err(InnerError::NoApplicableMethod(op.variant_name()));
    };
    let d = op.dim();
    let shifted = l + DMatrix::from_diagonal_element(d, d, c);
    let rhs = b - k;
    let x = shifted
        .lu()
        .solve(&rhs)
        .ok_or(InnerError::SingularSystem)?;
    let residual = regularized_residual(op, space, c, b, &x);
    if residual > cfg.tol {
        return Err(InnerError::NonConvergence {
            iterations: 1,
            residual,
            tol: cfg.tol,
        });
    }
    Ok(InnerSolve {
        x,
        residual,
        iterations: 1,
    })
}

/// Damped Newton on the residual F(x) = A(x) + c x - b: full step first, then
/// halve until the residual decreases, at most 30 halvings.
fn newton_solve(
    op: &OperatorSpec,
    space: &SpaceSpec,
    c: f64,
    b: &Vector,
    cfg: &InnerConfig,
) -> Result<InnerSolve, InnerError> {
    let d = op.dim();
    let mut x = b / (op.identity_coefficient() + c);
    let mut residual = regularized_residual(op, space, c, b, &x);
    let mut iterations = 0;
    while residual > cfg.tol {
        if iterations >= cfg.max_iter {
            return Err(InnerError::NonConvergence {
                iterations,
                residual,
                tol: cfg.tol,
            });
        }
        let mut jac = DMatrix::zeros(d, d);
        for j in 0..d {
            let mut e = Vector::zeros(d);
            e[j] = 1.0;
            let col = op.derivative_apply(&x, &e)?;
            jac.set_column(j, &(col + c * e));
        }
        let f = op.apply(&x) + c * &x - b;
        let step = jac.lu().solve(&(-&f)).ok_or(InnerError::SingularSystem)?;
        let mut theta = 1.0;
        let mut halvings = 0;
        loop {
            let candidate = &x + theta * &step;
            let cand_res = regularized_residual(op, space, c, b, &candidate);
            if cand_res < residual {
                x = candidate;
                residual = cand_res;
                break;
            }
            halvings += 1;
            if halvings > 30 {
                return Err(InnerError::LineSearchStalled { residual });
            }
            theta *= 0.5;
        }
        iterations += 1;
    }
    Ok(InnerSolve {
        x,
        residual,
        iterations,
    })
}

/// Solves (alpha I + L) s = r for a linear action L (the derivative action of
/// an accretive operator) and asserts the resolvent bound
/// ||s|| <= (||r|| + tol) / alpha as a runtime check of accretiveness.
pub fn solve_shifted_linear<F>(
    l_action: F,
    space: &SpaceSpec,
    alpha: f64,
    r: &Vector,
    cfg: &InnerConfig,
) -> Result<InnerSolve, InnerError>
where
    F: Fn(&Vector) -> Vector,
{
    assert!(alpha > 0.0, "solve_shifted_linear: alpha must be positive, got {alpha}");
    let d = r.len();
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut e = Vector::zeros(d);
        e[j] = 1.0;
        let col = l_action(&e);
        assert_eq!(col.len(), d, "solve_shifted_linear: action changed dimension");
        m.set_column(j, &(col + alpha * e));
    }
    let s = m.clone().lu().solve(r).ok_or(InnerError::SingularSystem)?;
    let residual = space.norm(&(&m * &s - r));
    if residual > cfg.tol {
        return Err(InnerError::NonConvergence {
            iterations: 1,
            residual,
            tol: cfg.tol,
        });
    }
    let bound = (space.norm(r) + cfg.tol) / alpha;
    let norm = space.norm(&s);
    if norm > bound {
        return Err(InnerError::ResolventBoundViolated { norm, bound });
    }
    Ok(InnerSolve {
        x: s,
        residual,
        iterations: 1,
    })
}
