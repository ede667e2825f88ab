//! Seeded builders for the accretive test catalog. Every entry here passes
//! the sampled accretiveness suite across the supported spaces; the harness
//! config references the same constructors.

use nalgebra::DMatrix;

use crate::sampling::{gaussian_matrix, rng_from_seed};
use crate::space::{SpaceKind, SpaceSpec, Vector};

use super::{lp_opnorm_bound, NonexpansiveMap, OperatorSpec, ScalarMonotone};

/// Orthonormal columns obtained from the QR factorization of a seeded
/// Gaussian matrix.
pub fn seeded_orthonormal(dim: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    assert!(cols <= dim);
    let mut rng = rng_from_seed(seed);
    let g = gaussian_matrix(dim, dim, &mut rng);
    let qr = g.qr();
    let q = qr.q();
    q.columns(0, cols).into_owned()
}

/// U diag(eigs) U^T for orthonormal columns U.
pub fn psd_with_spectrum(basis: &DMatrix<f64>, eigs: &[f64]) -> DMatrix<f64> {
    assert_eq!(basis.ncols(), eigs.len());
    let d = DMatrix::from_diagonal(&Vector::from_vec(eigs.to_vec()));
    basis * d * basis.transpose()
}

/// Random symmetric PSD matrix of the given rank with eigenvalues drawn
/// uniformly from [eig_lo, eig_hi].
pub fn random_psd(dim: usize, rank: usize, eig_lo: f64, eig_hi: f64, seed: u64) -> DMatrix<f64> {
    use rand::Rng;
    assert!(rank <= dim && rank >= 1);
    assert!(eig_lo > 0.0 && eig_hi >= eig_lo);
    let basis = seeded_orthonormal(dim, rank, seed);
    let mut rng = rng_from_seed(seed.wrapping_add(1));
    let eigs: Vec<f64> = (0..rank)
        .map(|_| eig_lo + (eig_hi - eig_lo) * rng.random::<f64>())
        .collect();
    psd_with_spectrum(&basis, &eigs)
}

/// Seeded linear map scaled to operator norm <= `bound` in the given space
/// (exact singular-value scaling in the Hilbert model, the interpolation
/// bound in l^p).
pub fn random_linear_contraction(dim: usize, bound: f64, seed: u64, space: &SpaceSpec) -> NonexpansiveMap {
    assert!(bound > 0.0 && bound <= 1.0);
    let mut rng = rng_from_seed(seed);
    let m = gaussian_matrix(dim, dim, &mut rng);
    let norm = match space.kind() {
        SpaceKind::Hilbert => m.clone().svd(false, false).singular_values[0],
        SpaceKind::Lp { p } => lp_opnorm_bound(&m, p),
    };
    NonexpansiveMap::Linear {
        matrix: m * (bound / norm.max(1e-12)),
    }
}

/// Orthogonal matrix made of 2x2 rotation blocks (identity on the last
/// coordinate when the dimension is odd). Operator norm 1 in the Euclidean
/// norm, so it is a Hilbert-model nonexpansive map.
pub fn block_rotation(dim: usize, angle: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    let (s, c) = angle.sin_cos();
    let mut i = 0;
    while i + 1 < dim {
        m[(i, i)] = c;
        m[(i, i + 1)] = -s;
        m[(i + 1, i)] = s;
        m[(i + 1, i + 1)] = c;
        i += 2;
    }
    m
}

/// The named operator catalog for a space. Hilbert gets the full set
/// (PSD matrices, rotations, Euclidean ball projections); l^p models keep the
/// entries that are accretive for every exponent (box projections, diagonal
/// contractions and monotone coordinate maps, and their compositions).
pub fn standard_catalog(space: &SpaceSpec, seed: u64) -> Vec<(String, OperatorSpec)> {
    let d = space.dim();
    let mut ops: Vec<(String, OperatorSpec)> = Vec::new();

    let push_residual = |ops: &mut Vec<(String, OperatorSpec)>, name: &str, map: NonexpansiveMap| {
        let op = OperatorSpec::residual_of_nonexpansive(map, space, seed)
            .unwrap_or_else(|e| panic!("catalog entry {name}: {e}"));
        ops.push((name.to_string(), op));
    };

    push_residual(&mut ops, "identity (T = 0)", NonexpansiveMap::zero(d));
    push_residual(&mut ops, "zero (T = I)", NonexpansiveMap::identity(d));

    let box_map = NonexpansiveMap::ProjectBox {
        lower: Vector::from_element(d, -1.0),
        upper: Vector::from_element(d, 1.0),
    };
    push_residual(&mut ops, "box projection residual", box_map.clone());

    let diag_contraction = {
        use rand::Rng;
        let mut rng = rng_from_seed(seed.wrapping_add(7));
        let entries: Vec<f64> = (0..d).map(|_| 0.9 * rng.random::<f64>()).collect();
        NonexpansiveMap::Linear {
            matrix: DMatrix::from_diagonal(&Vector::from_vec(entries)),
        }
    };
    push_residual(&mut ops, "diagonal contraction residual", diag_contraction.clone());
    push_residual(
        &mut ops,
        "composition residual",
        NonexpansiveMap::Compose {
            outer: Box::new(diag_contraction.clone()),
            inner: Box::new(box_map),
        },
    );

    ops.push((
        "diagonal cubic".into(),
        OperatorSpec::diagonal_monotone(vec![ScalarMonotone::Cubic { scale: 1.0 }; d], 2.0).unwrap(),
    ));
    ops.push((
        "diagonal saturating".into(),
        OperatorSpec::diagonal_monotone(
            vec![
                ScalarMonotone::LinearTanh {
                    slope: 0.5,
                    tanh_scale: 1.0
                };
                d
            ],
            2.0,
        )
        .unwrap(),
    ));

    let affine_base =
        OperatorSpec::residual_of_nonexpansive(diag_contraction, space, seed).unwrap();
    let xhat = Vector::from_element(d, 0.5);
    let data = affine_base.apply(&xhat);
    ops.push((
        "affine residual over contraction".into(),
        OperatorSpec::affine_residual(affine_base, data).unwrap(),
    ));

    if matches!(space.kind(), SpaceKind::Hilbert) {
        ops.push((
            "singular PSD diagonal".into(),
            OperatorSpec::psd_linear(DMatrix::from_diagonal(&Vector::from_iterator(
                d,
                (0..d).map(|i| if i % 3 == 0 { 0.0 } else { 1.0 + i as f64 / d as f64 }),
            )))
            .unwrap(),
        ));
        ops.push((
            "random rank-deficient PSD".into(),
            OperatorSpec::psd_linear(random_psd(d, d.div_ceil(2), 0.5, 2.0, seed.wrapping_add(3)))
                .unwrap(),
        ));
        push_residual(
            &mut ops,
            "block rotation residual",
            NonexpansiveMap::Linear {
                matrix: block_rotation(d, std::f64::consts::FRAC_PI_2),
            },
        );
        push_residual(
            &mut ops,
            "ball projection residual",
            NonexpansiveMap::ProjectBall {
                center: Vector::zeros(d),
                radius: 2.0,
            },
        );
        push_residual(
            &mut ops,
            "random linear contraction residual",
            random_linear_contraction(d, 0.9, seed.wrapping_add(5), space),
        );
    }

    ops
}
