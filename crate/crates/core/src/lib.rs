//! Certification toolkit for growth rates of incidence matrices of disc
//! systems.
//!
//! * [`pf`]: exact Perron–Frobenius bounds, sub-invariance, submatrices and
//!   row moves.
//! * [`disc`]: disc systems, enlargements, layered surface families, the
//!   tightening pipeline and growth-rate certification.
//! * [`pushaway`]: the push-away surgery rewriting system and its
//!   confluence check.
//! * [`io`]: versioned JSON documents, reports, fuzz suites and the
//!   command-line driver.

pub mod disc;
pub mod io;
pub mod matrix;
pub mod pf;
pub mod pushaway;
pub mod rational;

pub use matrix::{IncidenceMatrix, IndexSubset, WeightVector};
pub use rational::Rational;
