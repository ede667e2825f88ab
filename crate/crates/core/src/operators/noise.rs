//! Noise wrappers producing perturbed operator data.
//!
//! `perturb` turns an exact affine residual A(x) = F(x) - f into a noisy one
//! A~(x) = F(x) + h B(x) - (f + delta u) where:
//!
//! * B is a seeded diagonal map `t -> a_i t + b_i tanh(t)` with nonnegative
//!   coefficients, hence accretive in every l^p model, normalized so that
//!   `||B(x)|| <= g(||x||)` for the configured growth function and
//!   `||B'(x)|| <= 1` everywhere. Adding h B therefore keeps the operator
//!   accretive and satisfies the operator-noise bound by construction.
//! * u is a seeded direction of unit norm in the space, so the data noise is
//!   exactly `||f_delta - f|| = delta`.

use rand::Rng;

use crate::sampling::rng_from_seed;
use crate::space::{SpaceSpec, Vector};

use super::{OperatorError, OperatorSpec, ScalarMonotone};

/// Nondecreasing growth envelope g for the operator-noise bound
/// `||F_h(x) - F(x)|| <= h g(||x||)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthFn {
    /// g(t) = offset + slope * t
    Affine { offset: f64, slope: f64 },
}

impl Default for GrowthFn {
    fn default() -> Self {
        GrowthFn::Affine {
            offset: 1.0,
            slope: 1.0,
        }
    }
}

impl GrowthFn {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            GrowthFn::Affine { offset, slope } => offset + slope * t,
        }
    }

    fn parts(&self) -> (f64, f64) {
        match *self {
            GrowthFn::Affine { offset, slope } => (offset, slope),
        }
    }
}

/// One level of the noise model: operator noise h, data noise delta, growth
/// envelope, and the seed that fixes the perturbation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub h: f64,
    pub delta: f64,
    pub growth: GrowthFn,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(h: f64, delta: f64, seed: u64) -> Self {
        assert!(h >= 0.0 && h.is_finite(), "noise level h must be finite and >= 0");
        assert!(
            delta >= 0.0 && delta.is_finite(),
            "noise level delta must be finite and >= 0"
        );
        NoiseSpec {
            h,
            delta,
            growth: GrowthFn::default(),
            seed,
        }
    }

    pub fn with_growth(mut self, growth: GrowthFn) -> Self {
        let (offset, slope) = growth.parts();
        assert!(offset >= 0.0 && slope >= 0.0, "growth function must be nondecreasing and >= 0");
        self.growth = growth;
        self
    }
}

/// Returns the perturbed operator. With h = delta = 0 the operator is
/// returned unchanged (cloned), so zero-noise runs reduce bitwise to exact
/// ones.
pub fn perturb(
    op: &OperatorSpec,
    space: &SpaceSpec,
    noise: &NoiseSpec,
) -> Result<OperatorSpec, OperatorError> {
    let OperatorSpec::AffineResidual { base, data } = op else {
        return Err(OperatorError::PerturbRequiresAffine);
    };
    if noise.h == 0.0 && noise.delta == 0.0 {
        return Ok(op.clone());
    }
    let dim = op.dim();
    let mut rng = rng_from_seed(noise.seed);

    // Draw order is fixed (u first) so the data-noise direction does not
    // depend on whether operator noise is enabled.
    let u = crate::sampling::unit_vector(space, &mut rng);
    let a_raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let b_raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();

    let new_data = if noise.delta > 0.0 {
        data + noise.delta * u
    } else {
        data.clone()
    };

    let new_base = if noise.h > 0.0 {
        let (offset, slope) = noise.growth.parts();
        let a_max = a_raw.iter().cloned().fold(f64::MIN, f64::max).max(1e-9);
        let b_norm = space.norm(&Vector::from_vec(b_raw.clone())).max(1e-9);
        let b_hat: Vec<f64> = b_raw.iter().map(|v| v / b_norm).collect();
        let b_hat_max = b_hat.iter().cloned().fold(0.0, f64::max);
        // ||B(x)|| <= (slope ||x|| + offset) / denom <= g(||x||) and
        // ||B'|| <= (slope + offset * max b_hat) / denom <= 1.
        let denom = 1f64.max(slope + offset * b_hat_max);
        let funcs: Vec<ScalarMonotone> = (0..dim)
            .map(|i| ScalarMonotone::LinearTanh {
                slope: noise.h * slope * (a_raw[i] / a_max) / denom,
                tanh_scale: noise.h * offset * b_hat[i] / denom,
            })
            .collect();
        let bump = OperatorSpec::diagonal_monotone(funcs, 10.0)?;
        OperatorSpec::sum(vec![(**base).clone(), bump])?
    } else {
        (**base).clone()
    };

    OperatorSpec::affine_residual(new_base, new_data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::NonexpansiveMap;
    use crate::sampling::gaussian_vector;

    fn affine_identity(space: &SpaceSpec, f: Vector) -> OperatorSpec {
        let base =
            OperatorSpec::residual_of_nonexpansive(NonexpansiveMap::zero(f.len()), space, 1)
                .unwrap();
        OperatorSpec::affine_residual(base, f).unwrap()
    }

    #[test]
    fn zero_noise_is_identity_on_behavior() {
        let space = SpaceSpec::hilbert(3).unwrap();
        let op = affine_identity(&space, Vector::from_vec(vec![1.0, 2.0, 3.0]));
        let noisy = perturb(&op, &space, &NoiseSpec::new(0.0, 0.0, 9)).unwrap();
        assert_eq!(op, noisy);
        let mut rng = rng_from_seed(4);
        for _ in 0..100 {
            let x = gaussian_vector(3, &mut rng);
            assert_eq!(op.apply(&x), noisy.apply(&x));
        }
    }

    #[test]
    fn data_noise_has_exact_magnitude() {
        let space = SpaceSpec::hilbert(2).unwrap();
        let f = Vector::from_vec(vec![1.0, 0.0]);
        let op = affine_identity(&space, f.clone());
        let noisy = perturb(&op, &space, &NoiseSpec::new(0.0, 0.1, 42)).unwrap();
        let OperatorSpec::AffineResidual { data, .. } = &noisy else {
            panic!("expected affine residual")
        };
        assert!((space.norm(&(data - f)) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn operator_noise_respects_growth_bound() {
        for space in [SpaceSpec::hilbert(4).unwrap(), SpaceSpec::lp(3.0, 4).unwrap()] {
            let f = Vector::zeros(4);
            let op = affine_identity(&space, f);
            let h = 0.05;
            let noisy = perturb(&op, &space, &NoiseSpec::new(h, 0.0, 7)).unwrap();
            let growth = GrowthFn::default();
            let mut rng = rng_from_seed(70);
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let x = gaussian_vector(4, &mut rng) * 3.0;
                let gap = space.norm(&(noisy.apply(&x) - op.apply(&x)));
                worst = worst.max(gap / growth.eval(space.norm(&x)));
            }
            assert!(worst <= h + 1e-12, "worst ratio {worst} exceeds h = {h}");
        }
    }

    #[test]
    fn perturbed_operator_stays_accretive() {
        let space = SpaceSpec::lp(1.5, 4).unwrap();
        let f = Vector::from_vec(vec![0.5, -0.5, 0.0, 1.0]);
        let op = affine_identity(&space, f);
        let noisy = perturb(&op, &space, &NoiseSpec::new(0.3, 0.2, 13)).unwrap();
        let report = noisy.check_accretive(&space, 500, 21);
        assert!(report.pass, "min pairing {}", report.min_pairing);
    }

    #[test]
    fn derivative_perturbation_bounded_by_h() {
        let space = SpaceSpec::hilbert(3).unwrap();
        let op = affine_identity(&space, Vector::zeros(3));
        let h = 0.05;
        let noisy = perturb(&op, &space, &NoiseSpec::new(h, 0.0, 5)).unwrap();
        let mut rng = rng_from_seed(6);
        for _ in 0..50 {
            let x = gaussian_vector(3, &mut rng) * 2.0;
            let v = gaussian_vector(3, &mut rng);
            let gap = noisy.derivative_apply(&x, &v).unwrap() - op.derivative_apply(&x, &v).unwrap();
            assert!(space.norm(&gap) <= h * space.norm(&v) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn perturb_rejects_non_affine() {
        let space = SpaceSpec::hilbert(2).unwrap();
        let op = OperatorSpec::residual_of_nonexpansive(NonexpansiveMap::zero(2), &space, 1).unwrap();
        assert!(matches!(
            perturb(&op, &space, &NoiseSpec::new(0.1, 0.1, 2)),
            Err(OperatorError::PerturbRequiresAffine)
        ));
    }
}
