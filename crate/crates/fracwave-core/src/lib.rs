//! Petrov-Galerkin solver for the time-fractional wave equation
//!
//!   D_{0+}^alpha (u - u0 - t u1) - Laplace u = f   on (0,1) x (0,T),
//!
//! with homogeneous Dirichlet data and 1 < alpha < 2, where D_{0+}^alpha
//! is the Riemann-Liouville derivative. The discretization is piecewise
//! linear in time and space, tested against piecewise constants in time,
//! which yields a block lower-triangular Toeplitz system with
//! tridiagonal blocks.
//!
//! The crate provides:
//!
//! * [`fracops`] — Gamma, Mittag-Leffler, and the exact convolution
//!   weights of the discrete fractional derivative;
//! * [`mesh`] — uniform grids, P1 mass/stiffness assembly, singular
//!   power-law load vectors and initial-data projections;
//! * [`scheme`] — assembly of the space-time system;
//! * [`solver`] — sequential time stepping, FFT Toeplitz products and
//!   a divide-and-conquer fast solver;
//! * [`spectral`] — semi-analytic eigenfunction-expansion references;
//! * [`metrics`] — the error functionals E1/E2 and order extraction;
//! * [`study`] — convergence-study orchestration, CSV/plot emission
//!   and the self-test suite.

pub mod error;
pub mod field;
pub mod fracops;
pub mod mesh;
pub mod metrics;
pub mod quad;
pub mod scheme;
pub mod solver;
pub mod spectral;
pub mod study;

pub use error::{Error, Result};
pub use field::SolutionField;
pub use fracops::{KernelWeights, MittagLefflerParams};
pub use mesh::{InitialDatum, SpatialMesh, TemporalGrid, TridiagonalOperator};
pub use metrics::ConvergenceReport;
pub use scheme::{DiscreteSystem, ProblemSpec, SourceTerm};

#[cfg(test)]
pub(crate) mod testutil;
