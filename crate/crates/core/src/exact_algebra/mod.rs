//! Exact coefficient arithmetic: ℚ(i) scalars, truncated jet-Laurent
//! polynomials in `(t, x)`, and square matrices over them.

pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod scalar;

pub use linalg::ScalarMatrix;
pub use matrix::JetLaurentMatrix;
pub use poly::{JetLaurentPoly, Monomial};
pub use scalar::{format_rational, parse_rational, Rational, Scalar};
