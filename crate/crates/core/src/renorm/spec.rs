use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecspace::{Functional, SpaceSpec, SparseVec};

/// A renorming layered on top of a base space (see [`SpaceSpec::Renormed`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RenormSpec {
    /// `|y| = max( ‖y‖/(1+ε), sup_{i≠j} (|fᵢ(y)| + |fⱼ(y)|) )`.
    MaxBiortho { epsilon: f64, functionals: Vec<Functional> },

    /// `⦀x⦀ = inf{ |y| + b·‖x − y‖ : y ∈ span(subspace_basis) }`, where `|·|`
    /// is `inner` and `‖·‖` the base norm.
    IcExtension {
        subspace_basis: Vec<SparseVec>,
        inner: Box<SpaceSpec>,
        b: f64,
        /// Number of subspace basis vectors materialized (default: all).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support_budget: Option<usize>,
    },

    /// `|y| = inf{ ‖x‖_{ℓ1} + ‖y − Tx‖ : x supported on 1..=support_budget }`
    /// with `T eᵢ = blocks[i]`.
    JamesIc { blocks: Vec<SparseVec>, support_budget: usize },

    /// `⦀x⦀² = ‖x‖² + δ Σₙ 2⁻ⁿ fₙ(x)²`, declared for a target `ε` with
    /// `0 < δ < √(1+ε) − 1`.
    StrictConvex { delta: f64, epsilon: f64, functionals: Vec<Functional> },

    /// `‖x‖ = ‖(wᵢxᵢ)‖_base`; coordinates past the weight list keep weight 1.
    Diagonal { weights: Vec<f64> },
}

impl RenormSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RenormSpec::MaxBiortho { .. } => "max_biortho",
            RenormSpec::IcExtension { .. } => "ic_extension",
            RenormSpec::JamesIc { .. } => "james_ic",
            RenormSpec::StrictConvex { .. } => "strict_convex",
            RenormSpec::Diagonal { .. } => "diagonal",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RenormSpec::MaxBiortho { epsilon, functionals } => {
                if !(*epsilon > 0.0 && *epsilon < 1.0) {
                    return Err(Error::Parameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
                }
                if functionals.len() < 2 {
                    return Err(Error::Precondition("max-biorthogonal norm needs at least 2 functionals".into()));
                }
                Ok(())
            }
            RenormSpec::IcExtension { subspace_basis, inner, b, support_budget } => {
                if !(*b >= 1.0) || !b.is_finite() {
                    return Err(Error::Parameter(format!("b = {b} must be a finite number ≥ 1")));
                }
                if subspace_basis.is_empty() || subspace_basis.iter().any(SparseVec::is_zero) {
                    return Err(Error::Precondition("subspace basis must be nonempty with nonzero vectors".into()));
                }
                if let Some(sb) = support_budget {
                    if *sb < subspace_basis.len() {
                        return Err(Error::Budget(format!(
                            "support budget {sb} is smaller than the subspace basis ({})",
                            subspace_basis.len()
                        )));
                    }
                }
                inner.validate()
            }
            RenormSpec::JamesIc { blocks, support_budget } => {
                if blocks.is_empty() || blocks.iter().any(SparseVec::is_zero) {
                    return Err(Error::Precondition("James blocks must be nonempty and nonzero".into()));
                }
                if *support_budget == 0 || *support_budget > blocks.len() {
                    return Err(Error::Budget(format!(
                        "support budget {support_budget} must lie in 1..={}",
                        blocks.len()
                    )));
                }
                Ok(())
            }
            RenormSpec::StrictConvex { delta, epsilon, functionals } => {
                if !(*epsilon > 0.0) || !epsilon.is_finite() {
                    return Err(Error::Parameter(format!("epsilon = {epsilon} must be positive")));
                }
                let upper = (1.0 + epsilon).sqrt() - 1.0;
                if !(*delta > 0.0 && *delta < upper) {
                    return Err(Error::Parameter(format!(
                        "delta = {delta} must lie in the open interval (0, {upper})"
                    )));
                }
                if functionals.is_empty() {
                    return Err(Error::Precondition("strictly convex renorm needs functionals".into()));
                }
                Ok(())
            }
            RenormSpec::Diagonal { weights } => {
                if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
                    return Err(Error::Parameter(format!("diagonal weight {w} must be positive")));
                }
                Ok(())
            }
        }
    }

    pub fn touched_coords(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        match self {
            RenormSpec::MaxBiortho { functionals, .. } | RenormSpec::StrictConvex { functionals, .. } => {
                for f in functionals {
                    out.extend(f.0.support());
                }
            }
            RenormSpec::IcExtension { subspace_basis, inner, .. } => {
                for v in subspace_basis {
                    out.extend(v.support());
                }
                out.extend(inner.touched_coords());
            }
            RenormSpec::JamesIc { blocks, .. } => {
                for v in blocks {
                    out.extend(v.support());
                }
            }
            RenormSpec::Diagonal { weights } => out.extend(1..=weights.len()),
        }
        out
    }
}
