//! Exterior algebra over F_q in at most nine variables: multivectors, the
//! interior product, alternating matrices with Pfaffians, and the calculus of
//! subspaces V_a∧V_b∧V_c inside Λ³.

pub mod basis;
mod multivector;
mod skew;
mod subspace;
mod trivector;

pub use multivector::Multivector;
pub use skew::SkewMatrix;
pub use subspace::{in_sum_of_spans, wedge_space, Flag, Subspace};
pub use trivector::Trivector;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Pfaffian of odd size {0}")]
    OddSize(usize),
    #[error("matrix is not alternating")]
    NotAlternating,
    #[error("subspaces are not nested")]
    NotNested,
    #[error("basis matrix is singular")]
    Singular,
}
