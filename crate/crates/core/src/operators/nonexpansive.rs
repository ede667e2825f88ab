//! Nonexpansive maps T used to build residual operators A = I - T.
//!
//! Supported forms: linear maps, metric projections onto boxes and Euclidean
//! balls, and compositions of supported forms. Box projections are
//! nonexpansive in every l^p model (coordinatewise clipping); ball projections
//! are Euclidean objects and survive the construction check only where they
//! are actually nonexpansive.

use nalgebra::DMatrix;

use crate::space::Vector;

#[derive(Debug, Clone, PartialEq)]
pub enum NonexpansiveMap {
    Linear { matrix: DMatrix<f64> },
    ProjectBox { lower: Vector, upper: Vector },
    ProjectBall { center: Vector, radius: f64 },
    Compose { outer: Box<NonexpansiveMap>, inner: Box<NonexpansiveMap> },
}

impl NonexpansiveMap {
    pub fn zero(dim: usize) -> Self {
        NonexpansiveMap::Linear {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        NonexpansiveMap::Linear {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            NonexpansiveMap::Linear { matrix } => matrix.nrows(),
            NonexpansiveMap::ProjectBox { lower, .. } => lower.len(),
            NonexpansiveMap::ProjectBall { center, .. } => center.len(),
            NonexpansiveMap::Compose { outer, .. } => outer.dim(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        match self {
            NonexpansiveMap::Linear { matrix } => matrix * x,
            NonexpansiveMap::ProjectBox { lower, upper } => Vector::from_iterator(
                x.len(),
                x.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(&v, (&lo, &hi))| v.clamp(lo, hi)),
            ),
            NonexpansiveMap::ProjectBall { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center + d * (*radius / n)
                }
            }
            NonexpansiveMap::Compose { outer, inner } => outer.apply(&inner.apply(x)),
        }
    }

    /// Matrix of the map when it is linear through and through.
    pub fn linear_matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            NonexpansiveMap::Linear { matrix } => Some(matrix.clone()),
            NonexpansiveMap::Compose { outer, inner } => {
                Some(outer.linear_matrix()? * inner.linear_matrix()?)
            }
            _ => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        match self {
            NonexpansiveMap::Linear { .. } => true,
            NonexpansiveMap::Compose { outer, inner } => outer.is_linear() && inner.is_linear(),
            _ => false,
        }
    }
}

/// Upper bound for the l^p -> l^p operator norm of a matrix, valid for every
/// p in [1, inf]: interpolation between the max column sum (p = 1) and the
/// max row sum (p = inf).
pub fn lp_opnorm_bound(m: &DMatrix<f64>, p: f64) -> f64 {
    let col = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let row = (0..m.nrows())
        .map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if col == 0.0 || row == 0.0 {
        return 0.0;
    }
    col.powf(1.0 / p) * row.powf(1.0 - 1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn box_projection_clamps() {
        let t = NonexpansiveMap::ProjectBox {
            lower: Vector::from_vec(vec![-1.0, -1.0]),
            upper: Vector::from_vec(vec![1.0, 1.0]),
        };
        assert_eq!(
            t.apply(&Vector::from_vec(vec![2.0, -0.5])),
            Vector::from_vec(vec![1.0, -0.5])
        );
    }

    #[test]
    fn ball_projection_shrinks_to_boundary() {
        let t = NonexpansiveMap::ProjectBall {
            center: Vector::zeros(2),
            radius: 1.0,
        };
        let y = t.apply(&Vector::from_vec(vec![3.0, 4.0]));
        assert!((y.norm() - 1.0).abs() < 1e-14);
        let inside = Vector::from_vec(vec![0.3, 0.1]);
        assert_eq!(t.apply(&inside), inside);
    }

    #[test]
    fn composition_multiplies_linear_parts() {
        let a = dmatrix![0.0, -1.0; 1.0, 0.0];
        let b = dmatrix![0.5, 0.0; 0.0, 0.5];
        let t = NonexpansiveMap::Compose {
            outer: Box::new(NonexpansiveMap::Linear { matrix: a.clone() }),
            inner: Box::new(NonexpansiveMap::Linear { matrix: b.clone() }),
        };
        assert_eq!(t.linear_matrix().unwrap(), a * b);
        assert!(t.is_linear());
    }

    #[test]
    fn opnorm_bound_dominates_euclidean() {
        let m = dmatrix![1.0, 2.0; -0.5, 0.3];
        let sigma = m.clone().svd(false, false).singular_values[0];
        assert!(lp_opnorm_bound(&m, 2.0) + 1e-12 >= sigma);
    }
}
