//! Parallel regularization methods for consistent systems of accretive
//! operator equations `A_i(x) = 0, i = 1..N` in finite-dimensional models of
//! Hilbert and l^p spaces.
//!
//! The crate provides three solver families with exact and noisy-data
//! variants, the parameter-condition validators that go with them, and an
//! experiment harness:
//!
//! * [`pirm::run_implicit`] -- implicit parallel iterative regularization:
//!   each step solves N regularized subproblems
//!   `A_i(x) + (alpha_n/N + gamma_n) x = gamma_n x_n` concurrently and
//!   averages the solutions.
//! * [`pirm::run_explicit`] -- the explicit variant, one forward evaluation
//!   per equation per step.
//! * [`newton::run_newton`] -- a regularized Newton-type method with
//!   source-condition anchors and an a-priori stopping index for noisy data.
//!
//! Supporting modules: [`space`] (norms, duality mapping, moduli bounds),
//! [`operators`] (the accretive test catalog and noise wrappers), [`inner`]
//! (resolvent-type and shifted linear solvers), [`schedules`] (parameter
//! sequences and condition validators), [`diagnostics`] (minimum-norm
//! oracles, rate fitting), and [`harness`] (config-driven CLI runs).

pub mod diagnostics;
pub mod harness;
pub mod inner;
pub mod newton;
pub mod operators;
pub mod pirm;
pub mod problem;
pub mod sampling;
pub mod schedules;
pub mod space;
pub mod trace;

pub use problem::SystemProblem;
pub use space::{SpaceKind, SpaceSpec, Vector};
