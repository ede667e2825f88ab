//! Finite-dimensional space models: R^d with the Euclidean or an l^p norm.
//!
//! Everything the solvers need from the geometry of the space lives here: the
//! norm, the coordinate dual pairing, the normalized duality mapping J, the
//! modulus-of-smoothness/convexity bound formulas, and the accretiveness
//! modulus `phi` for residuals of nonexpansive maps together with its inverse
//! in the second argument. Infinite-dimensional l^p is modeled by coordinate
//! truncation to a fixed dimension d.

use nalgebra::DVector;
use thiserror::Error;

/// Column vector living in a model space.
pub type Vector = DVector<f64>;

/// Constant from the geometric inequalities of uniformly smooth and uniformly
/// convex spaces. Known results place it strictly inside (1, 1.7); we take the
/// upper end so that every bound built from it is conservative.
pub const FIGIEL_CONSTANT: f64 = 1.7;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("l^p exponent must be a finite real with p > 1, got {0}")]
    InvalidExponent(f64),
    #[error("space dimension must be at least 1")]
    ZeroDimension,
}

/// Which norm the model carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceKind {
    Hilbert,
    Lp { p: f64 },
}

/// A finite-dimensional space model: norm kind plus dimension.
///
/// `Hilbert` behaves identically to `Lp { p: 2 }` in every operation; both are
/// kept so that callers can state intent and tests can pin the equivalence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSpec {
    kind: SpaceKind,
    dim: usize,
}

impl SpaceSpec {
    pub fn hilbert(dim: usize) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        Ok(Self {
            kind: SpaceKind::Hilbert,
            dim,
        })
    }

    /// l^p model, truncated to `dim` coordinates. Requires 1 < p < infinity;
    /// the endpoints are rejected because those spaces are not uniformly
    /// smooth and the duality mapping degenerates.
    pub fn lp(p: f64, dim: usize) -> Result<Self, SpaceError> {
        if !(p.is_finite() && p > 1.0) {
            return Err(SpaceError::InvalidExponent(p));
        }
        if dim == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        Ok(Self {
            kind: SpaceKind::Lp { p },
            dim,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Norm exponent of the model: 2 for Hilbert, p for l^p.
    pub fn exponent(&self) -> f64 {
        match self.kind {
            SpaceKind::Hilbert => 2.0,
            SpaceKind::Lp { p } => p,
        }
    }

    /// Dual norm exponent q = p/(p-1), computed in one place so the
    /// conjugate-exponent arithmetic cannot drift between call sites.
    pub fn dual_exponent(&self) -> f64 {
        let p = self.exponent();
        p / (p - 1.0)
    }

    fn check_dim(&self, x: &Vector, what: &str) {
        assert_eq!(
            x.len(),
            self.dim,
            "{what}: vector dimension {} does not match space dimension {}",
            x.len(),
            self.dim
        );
    }

    /// The norm of the model: Euclidean for Hilbert, (sum |x_i|^p)^(1/p) for l^p.
    pub fn norm(&self, x: &Vector) -> f64 {
        self.check_dim(x, "norm");
        match self.kind {
            SpaceKind::Hilbert => x.norm(),
            SpaceKind::Lp { p } => lp_norm(x, p),
        }
    }

    /// Norm of the dual space: l^q with q = p/(p-1); Euclidean for Hilbert.
    pub fn dual_norm(&self, f: &Vector) -> f64 {
        self.check_dim(f, "dual_norm");
        match self.kind {
            SpaceKind::Hilbert => f.norm(),
            SpaceKind::Lp { .. } => lp_norm(f, self.dual_exponent()),
        }
    }

    /// Normalized duality mapping J, characterized by
    /// `<x, J(x)> = ||x||^2 = ||J(x)||_*^2`.
    ///
    /// In the Hilbert model J is the identity. In l^p,
    /// `J(x)_i = ||x||^(2-p) |x_i|^(p-1) sign(x_i)`; the origin is returned
    /// unchanged so the `||x||^(2-p)` factor is never evaluated at zero.
    pub fn duality_map(&self, x: &Vector) -> Vector {
        self.check_dim(x, "duality_map");
        match self.kind {
            SpaceKind::Hilbert => x.clone(),
            SpaceKind::Lp { p } => {
                let nrm = lp_norm(x, p);
                if nrm == 0.0 {
                    return Vector::zeros(x.len());
                }
                let scale = nrm.powf(2.0 - p);
                Vector::from_iterator(
                    x.len(),
                    x.iter().map(|&xi| {
                        if xi == 0.0 {
                            0.0
                        } else {
                            xi.signum() * xi.abs().powf(p - 1.0) * scale
                        }
                    }),
                )
            }
        }
    }

    /// Upper bound for the modulus of smoothness rho_X(tau).
    ///
    /// Hilbert: sqrt(1 + tau^2) - 1 (the exact modulus).
    /// l^p, p >= 2: (p - 1) tau^2. l^p, 1 < p < 2: tau^p / p.
    pub fn modulus_smoothness_bound(&self, tau: f64) -> f64 {
        assert!(
            tau >= 0.0 && tau.is_finite(),
            "modulus_smoothness_bound: tau must be finite and nonnegative, got {tau}"
        );
        match self.kind {
            SpaceKind::Hilbert => (1.0 + tau * tau).sqrt() - 1.0,
            SpaceKind::Lp { p } if p >= 2.0 => (p - 1.0) * tau * tau,
            SpaceKind::Lp { p } => tau.powf(p) / p,
        }
    }

    /// Lower bound for the modulus of convexity delta_X(eps) on [0, 2].
    ///
    /// l^p, 1 < p < 2: (p - 1) eps^2 / 16. l^p, p >= 2: eps^p / (p 2^p).
    /// Hilbert uses the p = 2 branch.
    pub fn modulus_convexity_bound(&self, eps: f64) -> f64 {
        assert!(
            (0.0..=2.0).contains(&eps),
            "modulus_convexity_bound: eps must lie in [0, 2], got {eps}"
        );
        let p = self.exponent();
        if p >= 2.0 {
            eps.powf(p) / (p * 2f64.powf(p))
        } else {
            (p - 1.0) * eps * eps / 16.0
        }
    }

    /// h_X(tau) = rho_X(tau) / tau, evaluated through the smoothness bound.
    /// The removable singularity at tau = 0 is taken as 0 (all branches are
    /// o(tau) there).
    pub fn smoothness_ratio(&self, tau: f64) -> f64 {
        assert!(
            tau >= 0.0 && tau.is_finite(),
            "smoothness_ratio: tau must be finite and nonnegative, got {tau}"
        );
        if tau == 0.0 {
            0.0
        } else {
            self.modulus_smoothness_bound(tau) / tau
        }
    }

    /// Accretiveness modulus phi(s, t) of the residual A = I - T of a
    /// nonexpansive map T on a ball of radius s.
    ///
    /// For p >= 2 (Hilbert included): t^p / (p L 8^p s^(p-2)).
    /// For 1 < p < 2: c t^2 with c = (p - 1) / (256 L).
    /// Strictly increasing in t, zero iff t = 0.
    pub fn phi_inverse_uniform(&self, s: f64, t: f64) -> f64 {
        assert!(s > 0.0, "phi_inverse_uniform: radius s must be positive, got {s}");
        assert!(
            t >= 0.0 && t.is_finite(),
            "phi_inverse_uniform: t must be finite and nonnegative, got {t}"
        );
        let p = self.exponent();
        if p >= 2.0 {
            t.powf(p) / (p * FIGIEL_CONSTANT * 8f64.powf(p) * s.powf(p - 2.0))
        } else {
            let c = (p - 1.0) / (256.0 * FIGIEL_CONSTANT);
            c * t * t
        }
    }

    /// Inverse of `phi_inverse_uniform` in the second argument: returns t with
    /// phi(s, t) = u, in closed form per branch.
    pub fn phi_inverse_function(&self, s: f64, u: f64) -> f64 {
        assert!(s > 0.0, "phi_inverse_function: radius s must be positive, got {s}");
        assert!(
            u >= 0.0 && u.is_finite(),
            "phi_inverse_function: u must be finite and nonnegative, got {u}"
        );
        let p = self.exponent();
        if p >= 2.0 {
            (u * p * FIGIEL_CONSTANT * 8f64.powf(p) * s.powf(p - 2.0)).powf(1.0 / p)
        } else {
            let c = (p - 1.0) / (256.0 * FIGIEL_CONSTANT);
            (u / c).sqrt()
        }
    }
}

/// Coordinate dual pairing <x, f> = sum x_i f_i. In the finite-dimensional
/// model the dual space is identified coordinatewise, so the pairing does not
/// depend on the norm.
pub fn dual_pair(x: &Vector, f: &Vector) -> f64 {
    assert_eq!(
        x.len(),
        f.len(),
        "dual_pair: dimensions {} and {} differ",
        x.len(),
        f.len()
    );
    x.iter().zip(f.iter()).map(|(a, b)| a * b).sum()
}

fn lp_norm(x: &Vector, p: f64) -> f64 {
    x.iter().map(|&v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Entry-wise finiteness guard used at API boundaries where vectors enter
/// from configuration or construction.
pub fn require_finite(what: &str, x: &Vector) {
    for (i, v) in x.iter().enumerate() {
        assert!(v.is_finite(), "{what}: entry {i} is not finite ({v})");
    }
}
