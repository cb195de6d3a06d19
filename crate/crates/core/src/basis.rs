//! Partial-sum and tail projection norms of finite basic sequences,
//! basis profiles and block bases.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_independent, combine, disjoint_supports};
use crate::optkit::{sphere_optimize_with_starts, Direction, OptBudget, OptResult};
use crate::par;
use crate::scalar::rational_from_f64;
use crate::vecspace::{Evaluator, SpaceSpec, SparseVec};
use crate::RenormSpec;

/// Relative tolerance of the monotone and bimonotone flags.
pub const MONOTONE_TOL: f64 = 1e-7;

/// Largest sequence length handled by the polyhedral exact path.
pub const EXACT_MAX_LEN: usize = 8;

/// Largest norming family enumerated by the polyhedral exact path.
pub const NORMING_CAP: usize = 4096;

/// Linearly independent vectors `y₁, …, y_m` in a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteBasicSequence {
    pub space: SpaceSpec,
    pub vectors: Vec<SparseVec>,
}

impl FiniteBasicSequence {
    /// Checks `m ≥ 2`, nonzero vectors and linear independence.
    pub fn new(space: SpaceSpec, vectors: Vec<SparseVec>) -> Result<Self> {
        space.validate()?;
        if vectors.len() < 2 {
            return Err(Error::Precondition(format!("a basic sequence needs m ≥ 2 vectors, got {}", vectors.len())));
        }
        check_independent(&vectors)?;
        Ok(Self { space, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `‖Pₙ‖` and `‖I − Pₙ‖` for `n = 1..m−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisProfile {
    pub proj_norms: Vec<f64>,
    pub tail_norms: Vec<f64>,
    pub basis_constant: f64,
    /// True when every entry is exact; otherwise the heuristic entries are
    /// lower bounds.
    pub certified: bool,
    /// Per-`n` flag: both entries at `n` exact.
    pub certified_per_n: Vec<bool>,
    pub monotone: bool,
    pub bimonotone: bool,
}

impl BasisProfile {
    /// CSV with columns `n,proj_norm,tail_norm,certified`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,proj_norm,tail_norm,certified\n");
        for (i, (p, t)) in self.proj_norms.iter().zip(&self.tail_norms).enumerate() {
            out.push_str(&format!("{},{:?},{:?},{}\n", i + 1, p, t, self.certified_per_n[i]));
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Part {
    Head,
    Tail,
}

/// `‖Pₙ‖ = sup{ ‖Σ_{i≤n} aᵢyᵢ‖ : ‖Σ aᵢyᵢ‖ ≤ 1 }`.
pub fn projection_norm(seq: &FiniteBasicSequence, n: usize, budget: &OptBudget) -> Result<OptResult> {
    part_norm(&Evaluator::default(), seq, n, Part::Head, budget)
}

/// `‖I − Pₙ‖ = sup{ ‖Σ_{i>n} aᵢyᵢ‖ : ‖Σ aᵢyᵢ‖ ≤ 1 }`.
pub fn tail_projection_norm(seq: &FiniteBasicSequence, n: usize, budget: &OptBudget) -> Result<OptResult> {
    part_norm(&Evaluator::default(), seq, n, Part::Tail, budget)
}

fn part_norm(ev: &Evaluator, seq: &FiniteBasicSequence, n: usize, part: Part, budget: &OptBudget) -> Result<OptResult> {
    let m = seq.len();
    if n == 0 || n >= m {
        return Err(Error::Precondition(format!("projection index {n} outside 1..{m}")));
    }
    let range = match part {
        Part::Head => 0..n,
        Part::Tail => n..m,
    };
    if let Some(w) = seq.space.euclidean_weights() {
        return euclidean_part_norm(&seq.vectors, &w, range);
    }
    if seq.space.is_lattice() && disjoint_supports(&seq.vectors) {
        let mut a = vec![0.0; m];
        a[range.start] = 1.0;
        return Ok(OptResult::exact(1.0, a));
    }
    if m <= EXACT_MAX_LEN && ev.is_polyhedral(&seq.space) {
        let part_vecs = &seq.vectors[range.clone()];
        if let Some(family) = norming_family(&seq.space, part_vecs)? {
            let objectives: Vec<Vec<f64>> = family
                .iter()
                .map(|g| {
                    (0..m)
                        .map(|i| if range.contains(&i) { g.dot(&seq.vectors[i]) } else { 0.0 })
                        .collect()
                })
                .collect();
            let values = par::try_map_range(objectives.len(), |k| ev.span_dual_norm(&seq.space, &seq.vectors, &objectives[k]))?;
            let best = values.into_iter().fold(f64::NEG_INFINITY, f64::max);
            return Ok(OptResult::exact(best, Vec::new()));
        }
    }
    let mut start = vec![0.0; m];
    match part {
        Part::Head => start[0] = 1.0,
        Part::Tail => start[m - 1] = 1.0,
    }
    let vectors = &seq.vectors;
    sphere_optimize_with_starts(
        |x| ev.norm(&seq.space, x),
        vectors,
        |a, _| {
            let mut c = vec![0.0; m];
            c[range.clone()].copy_from_slice(&a[range.clone()]);
            ev.norm(&seq.space, &combine(vectors, &c))
        },
        Direction::Max,
        budget,
        &[start],
    )
}

/// Generalized eigenvalue `λ_max(A, G)` with `G` the weighted Gram matrix and
/// `A` its restriction to `range`.
fn euclidean_part_norm(vectors: &[SparseVec], w: &[f64], range: std::ops::Range<usize>) -> Result<OptResult> {
    let m = vectors.len();
    let weight = |c: usize| w.get(c - 1).copied().unwrap_or(1.0);
    let inner = |a: &SparseVec, b: &SparseVec| -> f64 {
        a.iter().map(|(c, x)| x * b.get(c) * weight(c) * weight(c)).sum()
    };
    let g = DMatrix::from_fn(m, m, |i, j| inner(&vectors[i], &vectors[j]));
    let a = DMatrix::from_fn(m, m, |i, j| if range.contains(&i) && range.contains(&j) { g[(i, j)] } else { 0.0 });
    let chol = g
        .cholesky()
        .ok_or_else(|| Error::Rank("Gram matrix is not positive definite".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Rank("Gram factor is singular".into()))?;
    let mut sym = &l_inv * a * l_inv.transpose();
    sym = (&sym + sym.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let (k, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, x)| if x > b.1 { (i, x) } else { b });
    let coeffs = l_inv.transpose() * eig.eigenvectors.column(k);
    Ok(OptResult::exact(lambda.max(0.0).sqrt(), coeffs.iter().copied().collect()))
}

/// Coordinate functionals `g` with `‖x‖ = max_g g(x)` for every `x` in the
/// span of `vectors`, when such a family is small enough to enumerate.
fn norming_family(space: &SpaceSpec, vectors: &[SparseVec]) -> Result<Option<Vec<SparseVec>>> {
    let support: BTreeSet<usize> = vectors.iter().flat_map(|v| v.support()).collect();
    let out = match space {
        SpaceSpec::Lp { p } if p.0 == 1.0 => l1_family(vectors, &support),
        SpaceSpec::Lp { p } if p.is_infinite() => Some(sup_family(&support)),
        SpaceSpec::C0 => Some(sup_family(&support)),
        SpaceSpec::Renormed { base, renorm } => match &**renorm {
            RenormSpec::Diagonal { weights } => {
                let wt = |c: usize| weights.get(c - 1).copied().unwrap_or(1.0);
                let scaled: Vec<SparseVec> = vectors
                    .iter()
                    .map(|v| {
                        let mut s = SparseVec::zero();
                        for (c, x) in v.iter() {
                            s.set(c, x * wt(c));
                        }
                        s
                    })
                    .collect();
                norming_family(base, &scaled)?.map(|fam| {
                    fam.into_iter()
                        .map(|g| {
                            let mut s = SparseVec::zero();
                            for (c, x) in g.iter() {
                                s.set(c, x * wt(c));
                            }
                            s
                        })
                        .collect()
                })
            }
            RenormSpec::MaxBiortho { epsilon, functionals } => {
                norming_family(base, vectors)?.map(|fam| {
                    let mut all: Vec<SparseVec> = fam.into_iter().map(|g| g.scale(&(1.0 / (1.0 + epsilon)))).collect();
                    for i in 0..functionals.len() {
                        for j in (i + 1)..functionals.len() {
                            for s in [1.0, -1.0] {
                                let g = functionals[i].0.axpy(&s, &functionals[j].0);
                                all.push(g.neg());
                                all.push(g);
                            }
                        }
                    }
                    all
                })
            }
            _ => None,
        },
        _ => None,
    };
    Ok(out.filter(|f| f.len() <= NORMING_CAP))
}

fn sup_family(support: &BTreeSet<usize>) -> Vec<SparseVec> {
    support.iter().map(|&c| SparseVec::unit(c)).collect()
}

/// Sign patterns over coordinate rows, merging rows that are parallel on the
/// span; one pattern per antipodal pair.
fn l1_family(vectors: &[SparseVec], support: &BTreeSet<usize>) -> Option<Vec<SparseVec>> {
    let mut classes: Vec<(Vec<f64>, Vec<(usize, f64)>)> = Vec::new();
    for &c in support {
        let row: Vec<f64> = vectors.iter().map(|v| v.get(c)).collect();
        let pivot = row.iter().copied().find(|x| *x != 0.0)?;
        let unit: Vec<f64> = row.iter().map(|x| x / pivot).collect();
        match classes.iter_mut().find(|(u, _)| u.iter().zip(&unit).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))) {
            Some((_, members)) => members.push((c, pivot.signum())),
            None => classes.push((unit, vec![(c, pivot.signum())])),
        }
    }
    let k = classes.len();
    if k == 0 || k > 13 {
        return None;
    }
    let mut out = Vec::with_capacity(1 << (k - 1));
    for mask in 0..(1usize << (k - 1)) {
        let mut g = SparseVec::zero();
        for (j, (_, members)) in classes.iter().enumerate() {
            let s = if j > 0 && mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
            for &(c, sign) in members {
                g.set(c, s * sign);
            }
        }
        out.push(g);
    }
    Some(out)
}

/// Both projection lists, the basis constant and the monotonicity flags.
pub fn profile(seq: &FiniteBasicSequence, budget: &OptBudget) -> Result<BasisProfile> {
    let ev = Evaluator::default();
    let m = seq.len();
    let results = par::try_map_range(2 * (m - 1), |k| {
        let part = if k < m - 1 { Part::Head } else { Part::Tail };
        part_norm(&ev, seq, k % (m - 1) + 1, part, budget)
    })?;
    let (head, tail) = results.split_at(m - 1);
    let proj_norms: Vec<f64> = head.iter().map(|r| r.value).collect();
    let tail_norms: Vec<f64> = tail.iter().map(|r| r.value).collect();
    let certified_per_n: Vec<bool> = head.iter().zip(tail).map(|(h, t)| h.certified && t.certified).collect();
    let within = |x: &f64| *x <= 1.0 + MONOTONE_TOL;
    let monotone = proj_norms.iter().all(within);
    Ok(BasisProfile {
        basis_constant: proj_norms.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        certified: certified_per_n.iter().all(|c| *c),
        monotone,
        bimonotone: monotone && tail_norms.iter().all(within),
        proj_norms,
        tail_norms,
        certified_per_n,
    })
}

/// `zₙ = Σ_{i∈Eₙ} αⁿᵢ xᵢ` for strictly increasing blocks `E₁ < E₂ < …`
/// (indices are 1-based positions in `seq`).
pub fn block_basis(seq: &FiniteBasicSequence, blocks: &[(Vec<usize>, Vec<f64>)]) -> Result<FiniteBasicSequence> {
    let mut prev_max = 0;
    let mut out = Vec::with_capacity(blocks.len());
    for (k, (set, coeffs)) in blocks.iter().enumerate() {
        if set.is_empty() || set.len() != coeffs.len() {
            return Err(Error::Precondition(format!("block {} needs matching nonempty indices and coefficients", k + 1)));
        }
        if set.windows(2).any(|w| w[0] >= w[1]) || set[0] <= prev_max {
            return Err(Error::Ordering(format!("block {} does not lie strictly after its predecessor", k + 1)));
        }
        if let Some(&i) = set.iter().find(|&&i| i > seq.len()) {
            return Err(Error::Precondition(format!("block index {i} exceeds sequence length {}", seq.len())));
        }
        prev_max = *set.last().expect("nonempty");
        let z = set
            .iter()
            .zip(coeffs)
            .fold(SparseVec::zero(), |acc, (&i, a)| acc.axpy(a, &seq.vectors[i - 1]));
        if z.is_zero() {
            return Err(Error::Precondition(format!("block {} is zero", k + 1)));
        }
        out.push(z);
    }
    FiniteBasicSequence::new(seq.space.clone(), out)
}

/// True iff `A ≤ ‖xₙ‖ ≤ B` for every vector (exact comparison when the
/// space has an exact path).
pub fn is_seminormalized(seq: &FiniteBasicSequence, a: f64, b: f64) -> Result<bool> {
    if !(a > 0.0) || !(a <= b) || !b.is_finite() {
        return Err(Error::Parameter(format!("need 0 < A ≤ B, got A = {a}, B = {b}")));
    }
    let ev = Evaluator::default();
    let (ra, rb) = (rational_from_f64(a), rational_from_f64(b));
    for v in &seq.vectors {
        match ev.norm_exact(&seq.space, &v.to_rational())? {
            Some(n) => {
                if n < ra || n > rb {
                    return Ok(false);
                }
            }
            None => {
                let n = ev.norm(&seq.space, v)?;
                if n < a * (1.0 - 1e-12) || n > b * (1.0 + 1e-12) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
