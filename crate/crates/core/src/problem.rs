//! The system being solved: a space, an ordered list of accretive operators
//! sharing that space, and optional solution data for diagnostics.

use thiserror::Error;

use crate::operators::OperatorSpec;
use crate::space::{require_finite, SpaceSpec, Vector};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("a system needs at least one equation")]
    NoEquations,
    #[error("equation {index} has dimension {got}, space has dimension {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("known solution fails consistency: max_i ||A_i(x)|| = {residual:.3e} exceeds 1e-8 * scale")]
    InconsistentKnownSolution { residual: f64 },
    #[error("solution set descriptor has dimension mismatch")]
    SolutionSetDimension,
}

/// User-declared description of the solution set, for diagnostics: the affine
/// set anchor + span(directions).
#[derive(Debug, Clone)]
pub struct AffineSolutionSet {
    pub anchor: Vector,
    pub directions: Vec<Vector>,
}

/// A consistent system A_i(x) = 0, i = 1..N, over one space.
#[derive(Debug, Clone)]
pub struct SystemProblem {
    space: SpaceSpec,
    equations: Vec<OperatorSpec>,
    known_solution: Option<Vector>,
    solution_set: Option<AffineSolutionSet>,
}

impl SystemProblem {
    pub fn new(
        space: SpaceSpec,
        equations: Vec<OperatorSpec>,
        known_solution: Option<Vector>,
        solution_set: Option<AffineSolutionSet>,
    ) -> Result<Self, ProblemError> {
        if equations.is_empty() {
            return Err(ProblemError::NoEquations);
        }
        for (index, eq) in equations.iter().enumerate() {
            if eq.dim() != space.dim() {
                return Err(ProblemError::DimensionMismatch {
                    index,
                    expected: space.dim(),
                    got: eq.dim(),
                });
            }
        }
        if let Some(x) = &known_solution {
            require_finite("known_solution", x);
            if x.len() != space.dim() {
                return Err(ProblemError::DimensionMismatch {
                    index: 0,
                    expected: space.dim(),
                    got: x.len(),
                });
            }
            let scale = 1f64.max(space.norm(x));
            let worst = equations
                .iter()
                .map(|eq| space.norm(&eq.apply(x)))
                .fold(0.0, f64::max);
            if worst > 1e-8 * scale {
                return Err(ProblemError::InconsistentKnownSolution { residual: worst });
            }
        }
        if let Some(set) = &solution_set {
            if set.anchor.len() != space.dim()
                || set.directions.iter().any(|d| d.len() != space.dim())
            {
                return Err(ProblemError::SolutionSetDimension);
            }
        }
        Ok(SystemProblem {
            space,
            equations,
            known_solution,
            solution_set,
        })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn equations(&self) -> &[OperatorSpec] {
        &self.equations
    }

    pub fn n_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn known_solution(&self) -> Option<&Vector> {
        self.known_solution.as_ref()
    }

    pub fn solution_set(&self) -> Option<&AffineSolutionSet> {
        self.solution_set.as_ref()
    }

    /// Per-equation residual norms ||A_i(x)||.
    pub fn residuals(&self, x: &Vector) -> Vec<f64> {
        self.equations
            .iter()
            .map(|eq| self.space.norm(&eq.apply(x)))
            .collect()
    }

    pub fn max_residual(&self, x: &Vector) -> f64 {
        self.residuals(x).into_iter().fold(0.0, f64::max)
    }

    /// ||x - x_hat|| when the solution is known.
    pub fn error_to_known(&self, x: &Vector) -> Option<f64> {
        self.known_solution
            .as_ref()
            .map(|xs| self.space.norm(&(x - xs)))
    }

    /// The summed operator A = sum_i A_i (the system is equivalent to
    /// A(x) = 0 for inverse uniformly accretive equations).
    pub fn sum_operator(&self) -> OperatorSpec {
        if self.equations.len() == 1 {
            self.equations[0].clone()
        } else {
            OperatorSpec::sum(self.equations.clone()).expect("equations share the space dimension")
        }
    }

    /// Same system with the equation list permuted; diagnostics use this for
    /// the permutation-equivariance property.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, ProblemError> {
        assert_eq!(order.len(), self.equations.len());
        let equations = order.iter().map(|&i| self.equations[i].clone()).collect();
        SystemProblem::new(
            self.space,
            equations,
            self.known_solution.clone(),
            self.solution_set.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::NonexpansiveMap;
    use nalgebra::dmatrix;

    #[test]
    fn consistency_check_accepts_exact_solution() {
        let space = SpaceSpec::hilbert(2).unwrap();
        let base =
            OperatorSpec::residual_of_nonexpansive(NonexpansiveMap::zero(2), &space, 1).unwrap();
        let xhat = Vector::from_vec(vec![0.5, -1.0]);
        let data = base.apply(&xhat);
        let eq = OperatorSpec::affine_residual(base, data).unwrap();
        let problem = SystemProblem::new(space, vec![eq], Some(xhat.clone()), None).unwrap();
        assert_eq!(problem.error_to_known(&xhat), Some(0.0));
        assert!(problem.max_residual(&xhat) <= 1e-12);
    }

    #[test]
    fn consistency_check_rejects_wrong_solution() {
        let space = SpaceSpec::hilbert(2).unwrap();
        let eq = OperatorSpec::psd_linear(dmatrix![1.0, 0.0; 0.0, 1.0]).unwrap();
        let wrong = Vector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            SystemProblem::new(space, vec![eq], Some(wrong), None),
            Err(ProblemError::InconsistentKnownSolution { .. })
        ));
    }

    #[test]
    fn empty_systems_rejected() {
        let space = SpaceSpec::hilbert(2).unwrap();
        assert!(matches!(
            SystemProblem::new(space, vec![], None, None),
            Err(ProblemError::NoEquations)
        ));
    }
}
