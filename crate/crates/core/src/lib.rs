//! Matrix-function calculus on complex Hermitian matrices and a randomized
//! certification engine for entropy-type properties of convex scalar functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: Hermitian matrices, a cyclic Jacobi eigensolver, spectral
//!   calculus, random state generation and PSD margins.
//! - [`scalar`]: scalar functions on `(0, inf)` with derivative jets, an
//!   expression grammar, divided differences and the gap function `1/f''`.
//! - [`frechet`]: Fréchet differentials via Löwner matrices, their
//!   superoperator representations and inverses, and the second differential
//!   of the multi-variable trace functional `G`.
//! - [`quantum`]: tensor products, partial traces, block embeddings, Kraus
//!   channels, Stinespring isometries and the operator harmonic mean.
//! - [`certify`]: sampled convexity and operator-order tests with margins,
//!   counterexamples and the uniqueness pipeline.
//! - [`report`]: the JSON report and CSV sweep formats.

#![forbid(unsafe_code)]

pub mod certify;
pub mod error;
pub mod frechet;
pub mod linalg;
pub mod quantum;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Hermitian, PsdMargin, SpectralDecomposition};
pub use num_complex::Complex64;
pub use scalar::{Jet, ScalarFunction};

/// Version string echoed into reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
