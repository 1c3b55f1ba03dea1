//! Hyponormality, square-hyponormality, k-hyponormality and normality tests
//! for Toeplitz operators with scalar or matrix rational symbols.
//!
//! The decision engine works in the finite model of the compressed shift:
//! a rational symbol is factored against a finite Blaschke product, a
//! Hermite-Fejér interpolant `K` is built from the factorization, and the
//! operator is hyponormal exactly when `K(M)` is a contraction, where `M` is
//! the lower-triangular model of the compressed shift. Every verdict can be
//! cross-checked against exact finite sections of the self-commutator.
//!
//! Module map:
//! - [`symalg`]: Laurent and rational symbol arithmetic.
//! - [`blaschke`]: finite Blaschke products and inner/outer factorizations.
//! - [`modelspace`]: the Takenaka-Malmquist basis, the model matrix and
//!   Hermite-Fejér interpolation.
//! - [`operators`]: windowed Toeplitz/Hankel sections and positivity tests.
//! - [`decide`]: the verdict engine.
//! - [`suites`]: seeded randomized suites shared by the CLI and tests.

pub mod blaschke;
pub mod decide;
mod error;
pub mod linalg;
pub mod modelspace;
pub mod operators;
pub mod suites;
pub mod symalg;
mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tol::Tolerances;

/// Dense complex matrix used throughout the crate.
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<Complex64>;
