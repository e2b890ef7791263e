//! Radial harmonic analysis on the quantum matrix ball.
//!
//! The library implements, over binary64 with compensated summation:
//!
//! - q-special-function kernels (q-Pochhammer, q-Gamma, the terminating and
//!   convergent basic hypergeometric series behind the spherical functions),
//! - partitions, the dominance order, and the coordinate maps onto the
//!   radial grid and the joint spectrum,
//! - Jackson integrals of base q^2 and q^{-2}, the radial measure and its
//!   trace-side counterpart,
//! - one-variable and multivariate orthogonal polynomials (determinant
//!   formula), spherical eigenfunctions and their eigenvalue tuples,
//! - the commuting q-difference operators on the radial grid with banded
//!   matrix realizations and cyclicity diagnostics,
//! - the disk and matrix-ball Plancherel measures and the unitary
//!   forward/inverse spherical transform with quadrature over the spectral
//!   cube,
//! - a verification suite that re-checks every identity numerically.

pub mod context;
pub mod error;
pub mod measure;
pub mod partitions;
pub mod plancherel;
pub mod qdiff;
pub mod qseries;
pub mod spherical;
pub mod symm;
pub mod verify;

pub use context::QContext;
pub use error::{Error, Result};
pub use measure::RadialFunction;
pub use partitions::Partition;
pub use plancherel::{QuadratureRule, SpectralFunction, Transformer};
pub use qdiff::GridOperator;
