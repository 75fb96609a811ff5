//! Exact arithmetic layer: rationals, sparse combinations, linear algebra,
//! truncated q-series and Laurent jets.

mod graded;
mod laurent;
mod linalg;
mod qseries;
mod rational;
mod vector;

use thiserror::Error;

pub use graded::GradedSpace;
pub use laurent::LaurentJet;
pub use linalg::{inverse, nullspace, quotient_dim, rank_of_span, rref, solve, SparseEchelon};
pub use qseries::QSeries;
pub use rational::{
    abs, binomial, factorial, format_rational, int, parse_rational, pow, rat, sign, to_integer, Rational,
};
pub use vector::LinComb;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("q-series cutoffs differ ({left} vs {right})")]
    CutoffMismatch { left: usize, right: usize },
    #[error("exponent {exponent} is not below the tail order {tail}")]
    BeyondTail { exponent: i64, tail: i64 },
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}
