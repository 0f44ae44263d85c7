//! Finite Markov chains with polynomial transition rates.
//!
//! A [`SymbolicChain`] stores only off-diagonal rates; the rate matrix has
//! the negated row sums on its diagonal. Any uniform time-scale factor of
//! a discrete-time chain is dropped, which leaves the stationary vector
//! unchanged.

mod chain;
mod lumping;
mod measure;
pub mod modular;
mod reconstruct;

use thiserror::Error;

use crate::poly::PolyError;

pub use chain::{SymbolicChain, StationaryMethod};
pub use lumping::LumpingMap;
pub use measure::{Classification, Measure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("chain has no states")]
    Empty,
    #[error("duplicate state label `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {index} out of range for {len} states")]
    StateIndex { index: usize, len: usize },
    #[error("self-loop at state `{0}`")]
    SelfLoop(String),
    #[error("chain is reducible: `{from}` cannot reach `{to}`")]
    Reducible { from: String, to: String },
    #[error("measure has {got} entries but the chain has {expected} states")]
    IndexMismatch { expected: usize, got: usize },
    #[error("measure is identically zero")]
    ZeroMeasure,
    #[error("target state `{0}` has no preimage")]
    NotSurjective(String),
    #[error("lumping condition fails: `{first}` and `{second}` send different rates into `{target}`")]
    NotLumpable {
        first: String,
        second: String,
        target: String,
    },
    #[error("modular reconstruction did not converge: {0}")]
    Reconstruction(String),
    #[error("dense interpolation needs {0} coefficients per state, above the limit of {limit}", limit = modular::MAX_GRID)]
    GridTooLarge(usize),
    #[error("malformed chain description: {0}")]
    Format(String),
}
