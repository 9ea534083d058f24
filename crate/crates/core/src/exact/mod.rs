//! Exact arithmetic: rationals, Gaussian rationals, sparse polynomials and
//! exact linear algebra over Q(i).

mod gaussian;
mod matrix;
mod poly;

pub use gaussian::GaussianRational;
pub use matrix::{is_zero_vector, AffineSolution, ExactMatrix, ExactVector};
pub use poly::{Monomial, SparsePoly};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;
