//! Finite-dimensional experiments on basic sequences, renormings and
//! symmetric separation in classical sequence spaces.
//!
//! Vectors are finitely supported ([`SparseVec`]); spaces are described by
//! [`SpaceSpec`] and evaluated by [`Evaluator`]. Polyhedral norms have an
//! exact path over rationals used for certificates.

pub mod basis;
pub mod error;
pub mod linalg;
pub mod optkit;
pub mod par;
pub mod renorm;
pub mod scalar;
pub mod select;
pub mod separation;
pub mod vecspace;

pub use error::{Error, Result};
pub use optkit::{OptBudget, OptResult};
pub use renorm::RenormSpec;
pub use scalar::{Rational, Scalar};
pub use vecspace::{dual_norm, norm, Evaluator, Functional, SpaceSpec, SparseVec};

/// Crate version embedded in artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
