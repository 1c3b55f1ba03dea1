//! Symbol algebra: polynomials, analytic rational functions and matrix
//! Laurent polynomials on the unit circle.

pub mod poly;
pub mod rational;
pub mod symbol;

pub use poly::Poly;
pub use rational::{RationalAnalytic, RationalMatrix, RationalSymbol};
pub use symbol::MatrixLaurentSymbol;
