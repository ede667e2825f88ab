//! Per-coordinate scalar function families for diagonal monotone operators.
//! Each family is nondecreasing for nonnegative coefficients, which makes the
//! induced diagonal map accretive in every l^p model.

/// A named nondecreasing scalar function with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarMonotone {
    /// g(t) = slope * t
    Linear { slope: f64 },
    /// g(t) = scale * t^3
    Cubic { scale: f64 },
    /// g(t) = slope * t + tanh_scale * tanh(t); the saturating part is what
    /// the noise wrapper uses to stay inside a growth bound.
    LinearTanh { slope: f64, tanh_scale: f64 },
}

impl ScalarMonotone {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarMonotone::Linear { slope } => slope * t,
            ScalarMonotone::Cubic { scale } => scale * t * t * t,
            ScalarMonotone::LinearTanh { slope, tanh_scale } => slope * t + tanh_scale * t.tanh(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            ScalarMonotone::Linear { slope } => slope,
            ScalarMonotone::Cubic { scale } => 3.0 * scale * t * t,
            ScalarMonotone::LinearTanh { slope, tanh_scale } => {
                let th = t.tanh();
                slope + tanh_scale * (1.0 - th * th)
            }
        }
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        match *self {
            ScalarMonotone::Linear { .. } => 0.0,
            ScalarMonotone::Cubic { scale } => 6.0 * scale * t,
            ScalarMonotone::LinearTanh { tanh_scale, .. } => {
                let th = t.tanh();
                -2.0 * tanh_scale * th * (1.0 - th * th)
            }
        }
    }

    /// All coefficients nonnegative, which is exactly nondecreasingness for
    /// these families.
    pub fn coefficients_nonnegative(&self) -> bool {
        match *self {
            ScalarMonotone::Linear { slope } => slope >= 0.0 && slope.is_finite(),
            ScalarMonotone::Cubic { scale } => scale >= 0.0 && scale.is_finite(),
            ScalarMonotone::LinearTanh { slope, tanh_scale
            } => slope >= 0.0 && slope.is_finite() && tanh_scale >= 0.0 && tanh_scale.is_finite(),
        }
    }

    /// Lipschitz constant of g on |t| <= radius.
    pub fn lipschitz_on(&self, radius: f64) -> f64 {
        match *self {
            ScalarMonotone::Linear { slope } => slope,
            ScalarMonotone::Cubic { scale } => 3.0 * scale * radius * radius,
            ScalarMonotone::LinearTanh { slope, tanh_scale } => slope + tanh_scale,
        }
    }

    /// Global Lipschitz constant, if one exists.
    pub fn global_lipschitz(&self) -> Option<f64> {
        match *self {
            ScalarMonotone::Linear { slope } => Some(slope),
            ScalarMonotone::Cubic { .. } => None,
            ScalarMonotone::LinearTanh { slope, tanh_scale } => Some(slope + tanh_scale),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_derivatives() {
        let g = ScalarMonotone::Cubic { scale: 1.0 };
        assert_eq!(g.value(2.0), 8.0);
        assert_eq!(g.derivative(1.0), 3.0);
        assert_eq!(g.second_derivative(2.0), 12.0);
    }

    #[test]
    fn tanh_family_bounded_curvature() {
        let g = ScalarMonotone::LinearTanh {
            slope: 0.5,
            tanh_scale: 2.0,
        };
        // max |g''| = 2 * tanh_scale * max |t (1 - t^2)| over t = tanh in [-1, 1],
        // attained at tanh = 1/sqrt(3).
        let analytic_max = 2.0 * 2.0 * (1.0 / 3f64.sqrt()) * (2.0 / 3.0);
        for i in -400..400 {
            let t = i as f64 * 0.01;
            assert!(g.second_derivative(t).abs() <= analytic_max + 1e-12);
        }
    }

    #[test]
    fn negative_coefficients_flagged() {
        assert!(!ScalarMonotone::Linear { slope: -0.1 }.coefficients_nonnegative());
        assert!(ScalarMonotone::Cubic { scale: 0.0 }.coefficients_nonnegative());
    }
}
