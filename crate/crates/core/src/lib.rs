//! Exact models of cohomology algebras and Hodge-theoretic obstruction
//! tests.
//!
//! Arithmetic is over Q and Q(i) throughout; no floating point is used in
//! any verdict.

pub mod algebra;
pub mod builders;
pub mod comb;
pub mod error;
pub mod gallery;
pub mod hodge;
pub mod linalg;
pub mod obstructions;
pub mod polarization;
pub mod problem;
pub mod report;
pub mod scalar;
pub mod spec;

pub use algebra::{AlgebraMap, Element, GradedAlgebra, MixedElement, Subspace};
pub use error::{Error, Result};
pub use scalar::{GaussRational, Rational};
