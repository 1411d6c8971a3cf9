//! Finite-precision p-adic computer algebra: truncated Fontaine-style period
//! rings with Frobenius, monodromy and Galois structure, a calculator for
//! period functors on explicitly presented Galois representations, and a
//! certified solver for p-adic integrable connections on polydisks.
//!
//! Everything is computed modulo explicit truncation parameters collected in
//! a [`PrecisionContext`]: a p-adic modulus `p^N`, tower levels for the
//! root systems, a kernel-adic cutoff `dX`, and degree caps for power series.
//! All values are immutable after construction and all operations are pure.

pub mod context;
pub mod error;
pub mod linalg;
pub mod scalar;
pub mod tate;

pub mod tower;

pub mod tilt;
pub mod witt;

pub mod ainf;
pub mod bdr;

pub mod periods;
pub mod reps;

pub mod solver;

pub use context::PrecisionContext;
pub use error::{CoreError, Result};
pub use scalar::{PNorm, PadicScalar};
pub use tate::TateSeries;
