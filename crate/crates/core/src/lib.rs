//! Numerical toolkit for joint spectra of commuting matrix tuples, the
//! multivariate Bochner–Phillips operator calculus, and the stability
//! analysis of multiparameter operator semigroups on cones.
//!
//! Everything is finite-dimensional: operators are dense complex matrices,
//! joint spectra are finite point sets in `C^n` computed exactly over a
//! finite candidate set, and the classical operator-theoretic statements
//! become executable cross-checks between independent computational routes
//! (stacked singular values, Koszul exactness, commutant feasibility,
//! simultaneous triangularization).

pub mod bernstein;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod koszul;
pub mod linalg;
pub mod rng;
pub mod spectra;
pub mod stability;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, CommutingTuple, SpectrumPointSet, ToleranceConfig};
