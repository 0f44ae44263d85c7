//! Exact polynomial arithmetic over the integers.
//!
//! [`MultiPoly`] is a sparse polynomial in the variables of a [`Ring`],
//! with arbitrary-precision coefficients. [`PolyMatrix`] carries the
//! fraction-free linear algebra (determinants, one-dimensional left
//! kernels) the Markov-chain code is built on.

mod gcd;
mod matrix;
mod multipoly;
mod parse;
mod ring;

use thiserror::Error;

pub use gcd::{gcd, gcd_all};
pub use matrix::{integer_determinant, PolyMatrix};
pub use multipoly::{arith, ArithOp, MultiPoly};
pub use ring::{Monomial, Ring, MAX_VARS};

pub(crate) use matrix::normalize_vector;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,
    #[error("no value assigned to variable `{0}`")]
    MissingVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("a ring supports at most {MAX_VARS} variables, got {0}")]
    TooManyVariables(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("left kernel is not one-dimensional: rank {rank} for size {size}")]
    KernelDimension { rank: usize, size: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Builds a rational assignment from `(name, numerator, denominator)` triples.
pub fn assignment<'a, I>(values: I) -> std::collections::BTreeMap<String, BigRational>
where
    I: IntoIterator<Item = (&'a str, i64, i64)>,
{
    values
        .into_iter()
        .map(|(n, p, q)| (n.to_string(), BigRational::new(p.into(), q.into())))
        .collect()
}

#[cfg(test)]
mod tests;
