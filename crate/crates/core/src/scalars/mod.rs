//! Exact arithmetic: Gaussian rationals, sparse polynomials and rational functions over
//! them, the scalar text grammar, and dense linear algebra over either field.

mod gauss;
pub mod gcd;
mod matrix;
mod parse;
mod poly;
mod ratfun;
pub mod univariate;

use thiserror::Error;

pub use gauss::GaussRational;
pub use matrix::{solve_linear_system, Field, LinearError, LinearSolution, Matrix};
pub use parse::{canonical_name, parse_constant, parse_scalar};
pub use poly::{Monomial, Polynomial, Var};
pub use ratfun::{limit_at_zero, Limit, RationalFunction};
pub use univariate::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown indeterminate `{name}` at position {position}")]
    UnknownName { name: String, position: usize },
    #[error("division by zero at position {position}")]
    DivisionByZero { position: usize },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator vanishes under substitution")]
    DenominatorVanishes,
}

/// Substitutes named values into `f`; convenience wrapper keyed by name.
pub fn substitute(
    f: &RationalFunction,
    bindings: &std::collections::BTreeMap<Var, RationalFunction>,
) -> Result<RationalFunction, ScalarError> {
    f.substitute(bindings)
}
