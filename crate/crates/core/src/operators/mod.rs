//! The catalog of accretive test operators, their derivative actions, noise
//! wrappers, and sample-based accretiveness checks.
//!
//! Operator values are immutable after construction and evaluation is pure,
//! so concurrent application across equations is the intended use. The
//! validating constructors are the supported way to build operators; they
//! combine exact certificates (eigenvalue checks, operator-norm bounds) with
//! seeded sampling where no certificate exists, and `certify` reports which
//! checks were exhaustive.

mod catalog;
mod noise;
mod nonexpansive;
mod scalar;

pub use catalog::{
    block_rotation, psd_with_spectrum, random_linear_contraction, random_psd, seeded_orthonormal,
    standard_catalog,
};
pub use noise::{perturb, GrowthFn, NoiseSpec};
pub use nonexpansive::{lp_opnorm_bound, NonexpansiveMap};
pub use scalar::ScalarMonotone;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::sampling::{gaussian_vector, point_in_ball, rng_from_seed};
use crate::space::{dual_pair, require_finite, SpaceKind, SpaceSpec, Vector};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("matrix is not symmetric: max |M - M^T| entry = {0:.3e}")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite: smallest eigenvalue = {0:.3e}")]
    NotPsd(f64),
    #[error("map failed the nonexpansiveness check: ||T(x)-T(y)|| / ||x-y|| = {ratio:.6} on sample {sample}")]
    NotNonexpansive { ratio: f64, sample: usize },
    #[error("scalar function {index} is not nondecreasing on the sampling box")]
    NotMonotone { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator variant does not support differentiation: {0}")]
    UnsupportedDerivative(&'static str),
    #[error("operation requires {needed}, but the operator is {got}")]
    UnsupportedVariant { needed: &'static str, got: &'static str },
    #[error("noise perturbation requires an affine residual operator F(x) - f")]
    PerturbRequiresAffine,
}

/// One accretive operator A of the system. See the variant docs for the
/// defining formulas.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// A(x) = M x with M symmetric positive semidefinite (a Hilbert-model
    /// operator).
    PsdLinear { matrix: DMatrix<f64> },
    /// A(x) = x - T(x) for a nonexpansive T.
    ResidualOfNonexpansive { map: NonexpansiveMap },
    /// A(x)_i = g_i(x_i) with each g_i nondecreasing; `box_radius` is the
    /// half-width of the interval on which monotonicity is sampled and the
    /// derivative Lipschitz constant estimated.
    DiagonalMonotone { funcs: Vec<ScalarMonotone>, box_radius: f64 },
    /// A(x) = F(x) - f.
    AffineResidual { base: Box<OperatorSpec>, data: Vector },
    /// A(x) = sum of accretive terms; produced by the noise wrapper.
    Sum { terms: Vec<OperatorSpec> },
}

/// Outcome of a sampled accretiveness check.
#[derive(Debug, Clone)]
pub struct AccretiveReport {
    pub min_pairing: f64,
    pub scale: f64,
    pub pass: bool,
}

/// Outcome of a sampled inverse-uniform-accretiveness check on a ball.
#[derive(Debug, Clone)]
pub struct InverseUniformReport {
    pub min_slack: f64,
    pub scale: f64,
    pub pass: bool,
}

/// One construction-time invariant check: whether it came from an exact
/// certificate or from sampling, and whether it passed.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub exact: bool,
    pub pass: bool,
}

impl OperatorSpec {
    /// Validated constructor for `PsdLinear`: symmetry to 1e-12 of scale and
    /// eigenvalues >= -1e-12 of scale, certified by a symmetric eigensolve.
    pub fn psd_linear(matrix: DMatrix<f64>) -> Result<Self, OperatorError> {
        let asym = (&matrix - matrix.transpose()).abs().max();
        let scale = 1f64.max(matrix.abs().max());
        if asym > 1e-12 * scale {
            return Err(OperatorError::NotSymmetric(asym));
        }
        let eigs = matrix.clone().symmetric_eigen().eigenvalues;
        let min_eig = eigs.min();
        if min_eig < -1e-12 * scale {
            return Err(OperatorError::NotPsd(min_eig));
        }
        Ok(OperatorSpec::PsdLinear { matrix })
    }

    /// Validated constructor for `ResidualOfNonexpansive`. Linear maps get an
    /// exact operator-norm certificate where one exists (singular values in
    /// the Hilbert model, an interpolation bound in l^p); every map is also
    /// checked on 200 seeded pairs in the space norm.
    pub fn residual_of_nonexpansive(
        map: NonexpansiveMap,
        space: &SpaceSpec,
        seed: u64,
    ) -> Result<Self, OperatorError> {
        if map.dim() != space.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: space.dim(),
                got: map.dim(),
            });
        }
        sampled_nonexpansive_check(&map, space, seed, 200)?;
        Ok(OperatorSpec::ResidualOfNonexpansive { map })
    }

    /// Validated constructor for `DiagonalMonotone`: coefficients must make
    /// each g_i nondecreasing, re-checked by sampling on a grid over
    /// [-box_radius, box_radius].
    pub fn diagonal_monotone(
        funcs: Vec<ScalarMonotone>,
        box_radius: f64,
    ) -> Result<Self, OperatorError> {
        assert!(box_radius > 0.0, "diagonal_monotone: box_radius must be positive");
        for (i, g) in funcs.iter().enumerate() {
            if !g.coefficients_nonnegative() {
                return Err(OperatorError::NotMonotone { index: i });
            }
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=200 {
                let t = -box_radius + 2.0 * box_radius * k as f64 / 200.0;
                let v = g.value(t);
                if v < prev - 1e-12 * 1f64.max(prev.abs()) {
                    return Err(OperatorError::NotMonotone { index: i });
                }
                prev = v;
            }
        }
        Ok(OperatorSpec::DiagonalMonotone { funcs, box_radius })
    }

    /// Validated constructor for `AffineResidual`.
    pub fn affine_residual(base: OperatorSpec, data: Vector) -> Result<Self, OperatorError> {
        if base.dim() != data.len() {
            return Err(OperatorError::DimensionMismatch {
                expected: base.dim(),
                got: data.len(),
            });
        }
        require_finite("affine_residual data", &data);
        Ok(OperatorSpec::AffineResidual {
            base: Box::new(base),
            data,
        })
    }

    /// Validated constructor for `Sum`.
    pub fn sum(terms: Vec<OperatorSpec>) -> Result<Self, OperatorError> {
        assert!(!terms.is_empty(), "sum: at least one term required");
        let dim = terms[0].dim();
        for t in &terms[1..] {
            if t.dim() != dim {
                return Err(OperatorError::DimensionMismatch {
                    expected: dim,
                    got: t.dim(),
                });
            }
        }
        Ok(OperatorSpec::Sum { terms })
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::PsdLinear { matrix } => matrix.nrows(),
            OperatorSpec::ResidualOfNonexpansive { map } => map.dim(),
            OperatorSpec::DiagonalMonotone { funcs, .. } => funcs.len(),
            OperatorSpec::AffineResidual { base, .. } => base.dim(),
            OperatorSpec::Sum { terms } => terms[0].dim(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            OperatorSpec::PsdLinear { .. } => "PsdLinear",
            OperatorSpec::ResidualOfNonexpansive { .. } => "ResidualOfNonexpansive",
            OperatorSpec::DiagonalMonotone { .. } => "DiagonalMonotone",
            OperatorSpec::AffineResidual { .. } => "AffineResidual",
            OperatorSpec::Sum { .. } => "Sum",
        }
    }

    /// Evaluates A(x).
    pub fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(
            x.len(),
            self.dim(),
            "apply: vector dimension {} does not match operator dimension {}",
            x.len(),
            self.dim()
        );
        match self {
            OperatorSpec::PsdLinear { matrix } => matrix * x,
            OperatorSpec::ResidualOfNonexpansive { map } => x - map.apply(x),
            OperatorSpec::DiagonalMonotone { funcs, .. } => Vector::from_iterator(
                x.len(),
                funcs.iter().zip(x.iter()).map(|(g, &xi)| g.value(xi)),
            ),
            OperatorSpec::AffineResidual { base, data } => base.apply(x) - data,
            OperatorSpec::Sum { terms } => {
                let mut acc = terms[0].apply(x);
                for t in &terms[1..] {
                    acc += t.apply(x);
                }
                acc
            }
        }
    }

    pub fn supports_derivative(&self) -> bool {
        match self {
            OperatorSpec::PsdLinear { .. } => true,
            OperatorSpec::ResidualOfNonexpansive { map } => map.is_linear(),
            OperatorSpec::DiagonalMonotone { .. } => true,
            OperatorSpec::AffineResidual { base, .. } => base.supports_derivative(),
            OperatorSpec::Sum { terms } => terms.iter().all(|t| t.supports_derivative()),
        }
    }

    /// Evaluates the derivative action A'(x) v.
    pub fn derivative_apply(&self, x: &Vector, v: &Vector) -> Result<Vector, OperatorError> {
        if x.len() != self.dim() || v.len() != self.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dim(),
                got: if x.len() != self.dim() { x.len() } else { v.len() },
            });
        }
        match self {
            OperatorSpec::PsdLinear { matrix } => Ok(matrix * v),
            OperatorSpec::ResidualOfNonexpansive { map } => match map.linear_matrix() {
                Some(t) => Ok(v - t * v),
                None => Err(OperatorError::UnsupportedDerivative(
                    "projection-based nonexpansive maps have kinks",
                )),
            },
            OperatorSpec::DiagonalMonotone { funcs, .. } => Ok(Vector::from_iterator(
                v.len(),
                funcs
                    .iter()
                    .zip(x.iter().zip(v.iter()))
                    .map(|(g, (&xi, &vi))| g.derivative(xi) * vi),
            )),
            OperatorSpec::AffineResidual { base, .. } => base.derivative_apply(x, v),
            OperatorSpec::Sum { terms } => {
                let mut acc = terms[0].derivative_apply(x, v)?;
                for t in &terms[1..] {
                    acc += t.derivative_apply(x, v)?;
                }
                Ok(acc)
            }
        }
    }

    /// A valid Lipschitz constant K for the derivative: 0 for linear
    /// variants; for `DiagonalMonotone` a grid-sampled bound on |g''| over the
    /// box, scaled by a 1.5 safety factor (an estimate, not a certificate).
    pub fn lipschitz_derivative_constant(&self) -> Result<f64, OperatorError> {
        match self {
            OperatorSpec::PsdLinear { .. } => Ok(0.0),
            OperatorSpec::ResidualOfNonexpansive { map } => {
                if map.is_linear() {
                    Ok(0.0)
                } else {
                    Err(OperatorError::UnsupportedDerivative(
                        "projection-based nonexpansive maps have kinks",
                    ))
                }
            }
            OperatorSpec::DiagonalMonotone { funcs, box_radius } => {
                let mut max_curv = 0.0f64;
                for g in funcs {
                    for k in 0..=1000 {
                        let t = -box_radius + 2.0 * box_radius * k as f64 / 1000.0;
                        max_curv = max_curv.max(g.second_derivative(t).abs());
                    }
                }
                Ok(1.5 * max_curv)
            }
            OperatorSpec::AffineResidual { base, .. } => base.lipschitz_derivative_constant(),
            OperatorSpec::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.lipschitz_derivative_constant()?;
                }
                Ok(acc)
            }
        }
    }

    /// When A is affine, returns (L, k) with A(x) = L x + k.
    pub fn linear_part(&self) -> Option<(DMatrix<f64>, Vector)> {
        let d = self.dim();
        match self {
            OperatorSpec::PsdLinear { matrix } => Some((matrix.clone(), Vector::zeros(d))),
            OperatorSpec::ResidualOfNonexpansive { map } => {
                let t = map.linear_matrix()?;
                Some((DMatrix::identity(d, d) - t, Vector::zeros(d)))
            }
            OperatorSpec::DiagonalMonotone { funcs, .. } => {
                let mut diag = Vec::with_capacity(d);
                for g in funcs {
                    match g {
                        ScalarMonotone::Linear { slope } => diag.push(*slope),
                        _ => return None,
                    }
                }
                Some((DMatrix::from_diagonal(&Vector::from_vec(diag)), Vector::zeros(d)))
            }
            OperatorSpec::AffineResidual { base, data } => {
                let (l, k) = base.linear_part()?;
                Some((l, k - data))
            }
            OperatorSpec::Sum { terms } => {
                let mut l = DMatrix::zeros(d, d);
                let mut k = Vector::zeros(d);
                for t in terms {
                    let (lt, kt) = t.linear_part()?;
                    l += lt;
                    k += kt;
                }
                Some((l, k))
            }
        }
    }

    /// Coefficient of the identity that can be split off as A = lambda x + N(x):
    /// 1 for residuals of nonexpansive maps, additive over sums. Used by the
    /// inner contraction solver.
    pub fn identity_coefficient(&self) -> f64 {
        match self {
            OperatorSpec::ResidualOfNonexpansive { .. } => 1.0,
            OperatorSpec::AffineResidual { base, .. } => base.identity_coefficient(),
            OperatorSpec::Sum { terms } => terms.iter().map(|t| t.identity_coefficient()).sum(),
            _ => 0.0,
        }
    }

    /// Global Lipschitz bound (in the space norm) of N = A - lambda x with
    /// lambda = `identity_coefficient`. None when no global bound exists.
    pub fn residual_lipschitz(&self, space: &SpaceSpec) -> Option<f64> {
        match self {
            OperatorSpec::PsdLinear { matrix } => {
                Some(lp_opnorm_bound(matrix, space.exponent()))
            }
            OperatorSpec::ResidualOfNonexpansive { .. } => Some(1.0),
            OperatorSpec::DiagonalMonotone { funcs, .. } => {
                let mut acc = 0.0f64;
                for g in funcs {
                    acc = acc.max(g.global_lipschitz()?);
                }
                Some(acc)
            }
            OperatorSpec::AffineResidual { base, .. } => base.residual_lipschitz(space),
            OperatorSpec::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.residual_lipschitz(space)?;
                }
                Some(acc)
            }
        }
    }

    /// Samples pairs (x, y) from a seeded Gaussian and reports the minimum of
    /// `<A(x) - A(y), J(x - y)>`. Passes iff the minimum is above
    /// -1e-12 * scale, where scale is the largest sampled |pairing| (at least 1).
    pub fn check_accretive(
        &self,
        space: &SpaceSpec,
        n_samples: usize,
        seed: u64,
    ) -> AccretiveReport {
        assert!(n_samples >= 1, "check_accretive: n_samples must be >= 1");
        let mut rng = rng_from_seed(seed);
        let mut min_pairing = f64::INFINITY;
        let mut scale = 1.0f64;
        for _ in 0..n_samples {
            let x = gaussian_vector(self.dim(), &mut rng);
            let y = gaussian_vector(self.dim(), &mut rng);
            let pairing = dual_pair(&(self.apply(&x) - self.apply(&y)), &space.duality_map(&(x - y)));
            min_pairing = min_pairing.min(pairing);
            scale = scale.max(pairing.abs());
        }
        AccretiveReport {
            min_pairing,
            scale,
            pass: min_pairing >= -1e-12 * scale,
        }
    }

    /// Samples pairs inside the ball of the given radius and checks the
    /// inverse-uniform-accretiveness inequality
    /// `<A(x) - A(y), J(x - y)> >= phi(R, ||A(x) - A(y)||)` with the space's
    /// phi. Supported for residuals of nonexpansive maps, optionally behind an
    /// affine data shift (which cancels in differences).
    pub fn check_inverse_uniform_accretive(
        &self,
        space: &SpaceSpec,
        radius: f64,
        n_samples: usize,
        seed: u64,
    ) -> Result<InverseUniformReport, OperatorError> {
        if !self.is_nonexpansive_residual() {
            return Err(OperatorError::UnsupportedVariant {
                needed: "ResidualOfNonexpansive (possibly affine-shifted)",
                got: self.variant_name(),
            });
        }
        assert!(radius > 0.0, "check_inverse_uniform_accretive: radius must be positive");
        let mut rng = rng_from_seed(seed);
        let mut min_slack = f64::INFINITY;
        let mut scale = 1.0f64;
        for _ in 0..n_samples {
            let x = point_in_ball(space, radius, &mut rng);
            let y = point_in_ball(space, radius, &mut rng);
            let diff = self.apply(&x) - self.apply(&y);
            let pairing = dual_pair(&diff, &space.duality_map(&(x - y)));
            let slack = pairing - space.phi_inverse_uniform(radius, space.norm(&diff));
            min_slack = min_slack.min(slack);
            scale = scale.max(pairing.abs());
        }
        Ok(InverseUniformReport {
            min_slack,
            scale,
            pass: min_slack >= -1e-12 * scale,
        })
    }

    fn is_nonexpansive_residual(&self) -> bool {
        match self {
            OperatorSpec::ResidualOfNonexpansive { .. } => true,
            OperatorSpec::AffineResidual { base, .. } => base.is_nonexpansive_residual(),
            _ => false,
        }
    }

    /// Re-runs the construction-time invariant checks, itemized, with an
    /// `exact` flag on the ones backed by a certificate rather than sampling.
    pub fn certify(&self, space: &SpaceSpec, seed: u64) -> Vec<CheckItem> {
        let mut items = Vec::new();
        match self {
            OperatorSpec::PsdLinear { matrix } => {
                let asym = (matrix - matrix.transpose()).abs().max();
                let scale = 1f64.max(matrix.abs().max());
                items.push(CheckItem {
                    name: "symmetric".into(),
                    exact: true,
                    pass: asym <= 1e-12 * scale,
                });
                let min_eig = matrix.clone().symmetric_eigen().eigenvalues.min();
                items.push(CheckItem {
                    name: "eigenvalues nonnegative".into(),
                    exact: true,
                    pass: min_eig >= -1e-12 * scale,
                });
            }
            OperatorSpec::ResidualOfNonexpansive { map } => {
                if let Some(t) = map.linear_matrix() {
                    let bound = match space.kind() {
                        SpaceKind::Hilbert => t.clone().svd(false, false).singular_values[0],
                        SpaceKind::Lp { p } => lp_opnorm_bound(&t, p),
                    };
                    if bound <= 1.0 + 1e-12 {
                        items.push(CheckItem {
                            name: "operator norm <= 1".into(),
                            exact: true,
                            pass: true,
                        });
                    }
                }
                let sampled = sampled_nonexpansive_check(map, space, seed, 200).is_ok();
                items.push(CheckItem {
                    name: "nonexpansive on 200 seeded pairs (non-exhaustive)".into(),
                    exact: false,
                    pass: sampled,
                });
            }
            OperatorSpec::DiagonalMonotone { funcs, box_radius } => {
                let pass =
                    Self::diagonal_monotone(funcs.clone(), *box_radius).is_ok();
                items.push(CheckItem {
                    name: "coordinate functions nondecreasing on grid (non-exhaustive)".into(),
                    exact: false,
                    pass,
                });
            }
            OperatorSpec::AffineResidual { base, .. } => {
                items.extend(base.certify(space, seed));
            }
            OperatorSpec::Sum { terms } => {
                for t in terms {
                    items.extend(t.certify(space, seed));
                }
            }
        }
        items
    }
}

fn sampled_nonexpansive_check(
    map: &NonexpansiveMap,
    space: &SpaceSpec,
    seed: u64,
    n_samples: usize,
) -> Result<(), OperatorError> {
    let mut rng = rng_from_seed(seed);
    for sample in 0..n_samples {
        let x = gaussian_vector(map.dim(), &mut rng) * 3.0;
        let y = gaussian_vector(map.dim(), &mut rng) * 3.0;
        let dx = space.norm(&(&x - &y));
        if dx < 1e-12 {
            continue;
        }
        let dt = space.norm(&(map.apply(&x) - map.apply(&y)));
        if dt > dx * (1.0 + 1e-10) {
            return Err(OperatorError::NotNonexpansive {
                ratio: dt / dx,
                sample,
            });
        }
    }
    Ok(())
}
