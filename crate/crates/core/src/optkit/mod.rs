//! Numerical kernels: 1-D convex minimization, multistart search over unit
//! spheres of finite-dimensional subspaces, infimal-convolution evaluation
//! and an exact linear-programming path for polyhedral norms.

mod infconv;
pub mod lp;
mod line;
mod sphere;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use infconv::{infimal_convolution, IcTerm, InfConv};
pub use line::minimize_1d_convex;
pub use lp::{LinConstraint, LinearProgram, LpSolution};
pub use sphere::{sphere_optimize, sphere_optimize_with_starts, Direction};

/// Work limits for the heuristic optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptBudget {
    pub restarts: usize,
    pub max_iters: usize,
    /// Absolute objective tolerance; also the final step size of pattern searches.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 500, tol: 1e-9, seed: 0 }
    }
}

impl OptBudget {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Parameter("restarts and max_iters must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Parameter(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Independent generator for restart `r`; does not depend on the restart count.
    pub(crate) fn rng(&self, r: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(r as u64 + 1);
        rng
    }
}

/// Outcome of an optimization.
///
/// For maximization `value` is the objective at a feasible point, hence a
/// valid lower bound; for minimization it is a valid upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub value: f64,
    pub argument: Vec<f64>,
    /// Produced by an exact path (closed form, eigenproblem or LP).
    pub certified: bool,
}

impl OptResult {
    pub fn exact(value: f64, argument: Vec<f64>) -> Self {
        Self { value, argument, certified: true }
    }

    pub fn heuristic(value: f64, argument: Vec<f64>) -> Self {
        Self { value, argument, certified: false }
    }
}

/// Solves a linear program, exactly when `S` is the rational field.
///
/// The result value is converted to `f64`; use [`lp::solve`] directly to keep
/// the exact optimum.
pub fn lp_exact<S: Scalar>(lp: &LinearProgram<S>) -> Result<OptResult> {
    let sol = lp.solve()?;
    Ok(OptResult {
        value: sol.value.to_f64(),
        argument: sol.x.iter().map(Scalar::to_f64).collect(),
        certified: true,
    })
}
