//! Renorming constructions: the max-biorthogonal norm, its
//! infimal-convolution extension, the James infimal-convolution norm, the
//! strictly convex quadratic renorm, and equivalence-constant estimation.

mod spec;

pub use spec::RenormSpec;

use num_traits::Signed;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optkit::{infimal_convolution, IcTerm, InfConv, OptBudget, OptResult};
use crate::scalar::{Rational, Scalar};
use crate::vecspace::{pair_generic, top_two_sum, Evaluator, Functional, SpaceSpec, SparseVec};

fn wrong_kind(expected: &str, got: &RenormSpec) -> Error {
    Error::Precondition(format!("expected a {expected} renorm, got {}", got.kind_name()))
}

/// `|y| = max(‖y‖/(1+ε), top-two sum of |fᵢ(y)|)`.
pub fn max_biortho_norm(base: &SpaceSpec, spec: &RenormSpec, y: &SparseVec) -> Result<f64> {
    if !matches!(spec, RenormSpec::MaxBiortho { .. }) {
        return Err(wrong_kind("max_biortho", spec));
    }
    Evaluator::default().norm(&SpaceSpec::renormed(base.clone(), spec.clone()), y)
}

/// `⦀x⦀ = inf{ |y| + b‖x − y‖ : y ∈ span(subspace_basis) }`.
pub fn ic_extension_norm(
    base: &SpaceSpec,
    spec: &RenormSpec,
    x: &SparseVec,
    budget: &OptBudget,
) -> Result<OptResult> {
    let RenormSpec::IcExtension { subspace_basis, inner, b, support_budget } = spec else {
        return Err(wrong_kind("ic_extension", spec));
    };
    spec.validate()?;
    let problem = InfConv { first: IcTerm::Mapped(inner), map: subspace_basis, second: base, second_scale: *b };
    let n = support_budget.unwrap_or(subspace_basis.len()).min(subspace_basis.len());
    infimal_convolution(&Evaluator::default(), &problem, x, n, budget)
}

/// `|y|_Y = inf{ ‖x‖_{ℓ1} + ‖y − Tx‖ }` with `T eᵢ = blocks[i]`.
pub fn james_ic_norm(base: &SpaceSpec, spec: &RenormSpec, y: &SparseVec, budget: &OptBudget) -> Result<OptResult> {
    let RenormSpec::JamesIc { blocks, support_budget } = spec else {
        return Err(wrong_kind("james_ic", spec));
    };
    spec.validate()?;
    let l1 = SpaceSpec::l1();
    let problem = InfConv { first: IcTerm::Coefficients(&l1), map: blocks, second: base, second_scale: 1.0 };
    infimal_convolution(&Evaluator::default(), &problem, y, *support_budget, budget)
}

/// `⦀x⦀ = (‖x‖² + δ Σ 2⁻ⁿ fₙ(x)²)^{1/2}`.
pub fn strictly_convex_norm(base: &SpaceSpec, spec: &RenormSpec, x: &SparseVec) -> Result<f64> {
    if !matches!(spec, RenormSpec::StrictConvex { .. }) {
        return Err(wrong_kind("strict_convex", spec));
    }
    Evaluator::default().norm(&SpaceSpec::renormed(base.clone(), spec.clone()), x)
}

/// Seeded random vector on coordinates `1..=dim` (about a third of the
/// entries zeroed, never the zero vector).
pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> SparseVec {
    loop {
        let dense: Vec<f64> = (0..dim)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.sample::<f64, _>(StandardNormal) })
            .collect();
        let v = SparseVec::from_dense(&dense);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Min and max of `‖x‖_b / ‖x‖_a` over `samples` seeded random vectors on
/// coordinates `1..=dim`: an inner estimate of the equivalence interval.
pub fn equivalence_constants(
    a: &SpaceSpec,
    b: &SpaceSpec,
    samples: usize,
    seed: u64,
    dim: usize,
) -> Result<(f64, f64)> {
    if samples == 0 || dim == 0 {
        return Err(Error::Parameter("samples and dim must be positive".into()));
    }
    let ev = Evaluator::default();
    let mut rng = OptBudget::default().with_seed(seed).rng(0);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..samples {
        let x = random_vector(&mut rng, dim);
        let r = ev.norm(b, &x)? / ev.norm(a, &x)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Outcome of checking `sup_{i≠j}(|fᵢ(y)| + |fⱼ(y)|) ≤ (1+ε)‖y‖` on samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PremiseReport {
    pub samples: usize,
    /// Largest observed ratio of the pair sum to `‖y‖`.
    pub worst_ratio: f64,
    pub bound: f64,
    pub holds: bool,
    /// True when every comparison was made in exact rational arithmetic.
    pub exact: bool,
}

/// Samples `y` with small rational entries on `1..=dim` and checks the
/// max-biorthogonal premise. Uses exact arithmetic when the base is
/// polyhedral.
pub fn premise_check(
    base: &SpaceSpec,
    epsilon: f64,
    functionals: &[Functional],
    samples: usize,
    seed: u64,
    dim: usize,
) -> Result<PremiseReport> {
    if samples == 0 || dim == 0 {
        return Err(Error::Parameter("samples and dim must be positive".into()));
    }
    let ev = Evaluator::default();
    let mut rng = OptBudget::default().with_seed(seed).rng(0);
    let exact = ev.is_polyhedral(base);
    let bound = 1.0 + epsilon;
    let rbound = Rational::from_f64(epsilon) + Rational::from_usize(1);
    let mut worst = 0.0f64;
    let mut holds = true;
    for _ in 0..samples {
        let mut y = SparseVec::<Rational>::zero();
        for i in 1..=dim {
            let num: i64 = rng.gen_range(-20..=20);
            let den: i64 = rng.gen_range(1..=12);
            y.set(i, Rational::new(num.into(), den.into()));
        }
        if y.is_zero() {
            continue;
        }
        if exact {
            let n = ev.norm_exact(base, &y)?.expect("polyhedral base has an exact path");
            let pairs = top_two_sum(functionals.iter().map(|f| pair_generic(f, &y).abs()));
            holds &= pairs <= rbound.clone() * n.clone();
            worst = worst.max((pairs / n).to_f64());
        } else {
            let yf = y.to_f64();
            let n = ev.norm(base, &yf)?;
            let pairs = top_two_sum(functionals.iter().map(|f| f.apply(&yf).abs()));
            let r = pairs / n;
            holds &= r <= bound * (1.0 + 1e-12);
            worst = worst.max(r);
        }
    }
    Ok(PremiseReport { samples, worst_ratio: worst, bound, holds, exact })
}

/// Default norming family for the strictly convex renorm on `1..=dim`: the
/// `2·dim` functionals `±eᵢ*` scaled into the dual ball, followed by `extra`
/// seeded random dual-ball functionals.
pub fn default_norming_family(base: &SpaceSpec, dim: usize, extra: usize, seed: u64) -> Result<Vec<Functional>> {
    let ev = Evaluator::default();
    let mut out = Vec::with_capacity(2 * dim + extra);
    for i in 1..=dim {
        let e = Functional::coordinate(i);
        let d = ev.dual_norm(base, &e)?;
        for sgn in [1.0, -1.0] {
            out.push(Functional(e.0.scale(&(sgn / d))));
        }
    }
    let mut rng = OptBudget::default().with_seed(seed).rng(1);
    for _ in 0..extra {
        let f = Functional(random_vector(&mut rng, dim));
        let d = ev.dual_norm(base, &f)?;
        out.push(Functional(f.0.scale(&(1.0 / d))));
    }
    Ok(out)
}

/// Blocks found by [`james_block_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSearch {
    /// Normalized blocks `u_k`.
    pub blocks: Vec<SparseVec>,
    pub block_length: usize,
    /// `min_σ ‖Σ σ_k u_k‖ / K` over sign vectors `σ`.
    pub constant: f64,
    /// Always false: sign patterns are necessary, not sufficient, witnesses.
    pub certified: bool,
}

/// Largest number of blocks whose sign patterns are enumerated.
pub const MAX_BLOCKS: usize = 12;

/// Groups consecutive candidates into equal-coefficient normalized blocks of
/// growing length until the sign-pattern lower `ℓ1` constant reaches
/// `1/(1+ε)`.
pub fn james_block_search(
    space: &SpaceSpec,
    candidate_basis: &[SparseVec],
    epsilon: f64,
    budget: &OptBudget,
) -> Result<BlockSearch> {
    if candidate_basis.len() < 2 {
        return Err(Error::Precondition("block search needs at least 2 candidate vectors".into()));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Parameter(format!("epsilon = {epsilon} must be positive")));
    }
    budget.validate()?;
    let ev = Evaluator::default();
    let target = 1.0 / (1.0 + epsilon);
    let mut best = 0.0f64;
    let max_len = (candidate_basis.len() / 2).min(budget.max_iters);
    for len in 1..=max_len {
        let k = (candidate_basis.len() / len).min(MAX_BLOCKS);
        let mut blocks = Vec::with_capacity(k);
        for chunk in candidate_basis.chunks_exact(len).take(k) {
            let s = chunk.iter().fold(SparseVec::zero(), |acc, v| acc.add(v));
            let n = ev.norm(space, &s)?;
            if !(n > 0.0) {
                return Err(Error::Precondition(format!("block of length {len} sums to zero")));
            }
            blocks.push(s.scale(&(1.0 / n)));
        }
        let constant = sign_pattern_constant(&ev, space, &blocks)?;
        best = best.max(constant);
        if constant >= target * (1.0 - 1e-12) {
            return Ok(BlockSearch { blocks, block_length: len, constant, certified: false });
        }
    }
    Err(Error::Exhausted { best, target })
}

/// `min_σ ‖Σ σ_k u_k‖ / K` with `σ₁ = +1`.
pub fn sign_pattern_constant(ev: &Evaluator, space: &SpaceSpec, blocks: &[SparseVec]) -> Result<f64> {
    let k = blocks.len();
    if k == 0 || k > MAX_BLOCKS + 8 {
        return Err(Error::Parameter(format!("cannot enumerate sign patterns of {k} blocks")));
    }
    let values = crate::par::try_map_range(1usize << (k - 1), |mask| -> Result<f64> {
        let mut s = blocks[0].clone();
        for (j, b) in blocks.iter().enumerate().skip(1) {
            let sgn = if mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
            s = s.axpy(&sgn, b);
        }
        ev.norm(space, &s)
    })?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min) / k as f64)
}
