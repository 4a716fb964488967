//! Integrated density of states for randomly weighted Hamiltonians on
//! long-range percolation graphs over `Z^d`.
//!
//! A realization of the random graph is a pure function of a master seed:
//! every edge indicator and weight is drawn from a counter-based stream
//! keyed by the canonical edge encoding, so one realization is shared by
//! every box `Λ_n = ([-n, n] ∩ Z)^d` it is restricted to.
//!
//! The pipeline is
//!
//! ```text
//! ModelParams ──sample_window──▶ WindowGraph ──assemble──▶ SymmetricMatrix
//!             ──eigen──▶ Spectrum ──counting_function/normalize──▶ StepFunction
//! ```
//!
//! with the estimators in [`ids`] and the boundary/long-edge quantities in
//! [`diagnostics`] layered on top.

pub mod cache;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod ids;
pub mod kernels;
pub mod lattice;
pub mod operator;
pub mod rng;
pub mod sampler;
pub mod spectra;

pub use error::{Error, Result};
pub use kernels::{DiagonalConvention, Kernel, KernelFamily, ModelParams, WeightFamily, WeightLaw};
pub use operator::SymmetricMatrix;
pub use sampler::{EdgeKey, SamplingOptions, WindowGraph};
pub use spectra::{Spectrum, StepFunction};
