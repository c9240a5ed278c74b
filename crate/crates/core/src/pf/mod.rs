//! Exact-rational Perron–Frobenius engine.
//!
//! Irreducibility and strongly connected components of the incidence
//! digraph, Collatz–Wielandt bracketing of the spectral radius, sub-invariance
//! checks `Mv <= λv` and their powers, principal submatrices, the row-copy
//! tightening move and the first-row propagation check.
//!
//! No floating point is used anywhere in this module.

mod graph;
mod moves;
mod perron;
mod subinvariance;

pub use graph::{first_reach, is_irreducible, scc_decompose};
pub use moves::{extract, propagation_check, row_copy, submatrix};
pub use perron::{perron_bounds, perron_bounds_from, PerronCertificate, PerronIteration};
pub use subinvariance::{
    check_subinvariance, dominated_power_check, power_subinvariance, submatrix_strict_drop,
    SubinvarianceReport,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PfError {
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("index subset is empty")]
    EmptySubset,
    #[error("index subset is not strictly increasing")]
    SubsetNotIncreasing,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not irreducible")]
    NotIrreducible,
    #[error("submatrix is not irreducible")]
    SubmatrixNotIrreducible,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("starting vector must be strictly positive")]
    NonPositiveStart,
    /// A theorem-backed inequality failed. This is never a property of valid
    /// input; it indicates an arithmetic defect.
    #[error("{lemma} violated at index {index} for power {power}")]
    LemmaViolation {
        lemma: &'static str,
        index: usize,
        power: u32,
    },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<(), PfError> {
    if expected == found {
        Ok(())
    } else {
        Err(PfError::DimensionMismatch { expected, found })
    }
}
