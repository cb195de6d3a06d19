//! Sparse vectors and norm/dual-norm oracles for `ℓp`, `c0`, Tsirelson's
//! space `T` and its dual, and renormings of them.

mod eval;
mod space;
mod sparse;
pub mod tsirelson;

pub use eval::{Evaluator, NormConfig, NormValue};
pub(crate) use eval::{pair_generic, top_two_sum};
pub use space::{Exponent, SpaceSpec, TsirelsonVariant};
pub use sparse::{pair, Functional, SparseVec};
pub use tsirelson::tsirelson_norm;

use crate::error::Result;

/// `‖v‖` in `space` with the default configuration.
pub fn norm(space: &SpaceSpec, v: &SparseVec) -> Result<f64> {
    Evaluator::default().norm(space, v)
}

/// `‖f‖_*` in the dual of `space` with the default configuration.
pub fn dual_norm(space: &SpaceSpec, f: &Functional) -> Result<f64> {
    Evaluator::default().dual_norm(space, f)
}
