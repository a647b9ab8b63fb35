//! Sparse symmetric polynomial approximation of permutation-invariant
//! functions on `([-1,1]^d)^N` and of multi-set functions.
//!
//! The crate is organized around a one-body Chebyshev basis ([`one_body`]),
//! ordered multi-index enumeration and parameter-count bounds ([`indexing`]),
//! the pooled product basis with linear-cost recursive evaluation
//! ([`symbasis`]), least-squares fitting and convergence studies ([`fit`]),
//! cluster-expansion models of multi-set functions ([`mset`]), and a
//! tight-binding ground truth with provable body-order decay ([`tightbind`]).

pub mod error;
pub mod fit;
pub mod indexing;
pub mod mset;
pub mod one_body;
mod sampling;
pub mod symbasis;
pub mod tightbind;

pub use error::{Error, Result};
