//! Symmetric separation certificates and lower bounds for the symmetric
//! Kottman constant of finite truncations.

use num_traits::Signed;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optkit::OptBudget;
use crate::par;
use crate::scalar::{format_rational, parse_decimal, rational_from_f64, Rational};
use crate::vecspace::{Evaluator, SpaceSpec, SparseVec};

/// Largest separation a float-path certificate may claim.
pub const FLOAT_CAP: f64 = 2.0 - 1e-9;

/// Pairwise values `min(‖xᵢ−xⱼ‖, ‖xᵢ+xⱼ‖)` of a finite set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub space: SpaceSpec,
    pub vectors: Vec<SparseVec>,
    /// Minimum over all pairs.
    pub separation: f64,
    /// `max |‖xᵢ‖ − 1|`.
    pub unit_residual: f64,
    /// True when every norm was evaluated in exact rational arithmetic.
    pub certified: bool,
    /// `[i, j, value]` with 1-based `i < j`.
    pub pairs: Vec<(usize, usize, f64)>,
    /// Exact separation as `p/q` on the rational path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation_exact: Option<String>,
    /// Exact unit residual as `p/q` on the rational path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_residual_exact: Option<String>,
    /// Pairs with `xᵢ = ±xⱼ`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate: Vec<(usize, usize)>,
}

/// Builds the certificate for `vectors`; uses the rational path when
/// `exact` is set and the space has one.
pub fn symmetric_separation(space: &SpaceSpec, vectors: &[SparseVec], exact: bool) -> Result<SeparationCertificate> {
    symmetric_separation_with(&Evaluator::default(), space, vectors, exact)
}

/// As [`symmetric_separation`] with an explicit evaluator.
pub fn symmetric_separation_with(
    ev: &Evaluator,
    space: &SpaceSpec,
    vectors: &[SparseVec],
    exact: bool,
) -> Result<SeparationCertificate> {
    space.validate()?;
    if vectors.len() < 2 {
        return Err(Error::Precondition("separation needs at least 2 vectors".into()));
    }
    if let Some(k) = vectors.iter().position(SparseVec::is_zero) {
        return Err(Error::Precondition(format!("vector {} is zero", k + 1)));
    }
    let m = vectors.len();
    let index: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
    let degenerate: Vec<(usize, usize)> = index
        .iter()
        .filter(|(i, j)| vectors[*i] == vectors[*j] || vectors[*i] == vectors[*j].neg())
        .map(|(i, j)| (i + 1, j + 1))
        .collect();

    if exact && ev.is_polyhedral(space) {
        let rv: Vec<SparseVec<Rational>> = vectors.iter().map(SparseVec::to_rational).collect();
        let norm = |v: &SparseVec<Rational>| -> Result<Rational> {
            ev.norm_exact(space, v)?.ok_or_else(|| Error::Unsupported(format!("exact norm of {space}")))
        };
        let norms = par::try_map_range(m, |i| norm(&rv[i]))?;
        let one = Rational::from_integer(1.into());
        let residual = norms.iter().map(|n| (n - &one).abs()).max().expect("m ≥ 2");
        let values = par::try_map_range(index.len(), |k| -> Result<Rational> {
            let (i, j) = index[k];
            let a = norm(&rv[i].sub(&rv[j]))?;
            let b = norm(&rv[i].add(&rv[j]))?;
            Ok(a.min(b))
        })?;
        let sep = values.iter().min().expect("at least one pair").clone();
        let to_f = |r: &Rational| crate::scalar::Scalar::to_f64(r);
        return Ok(SeparationCertificate {
            space: space.clone(),
            vectors: vectors.to_vec(),
            separation: to_f(&sep),
            unit_residual: to_f(&residual),
            certified: true,
            pairs: index.iter().zip(&values).map(|((i, j), v)| (i + 1, j + 1, to_f(v))).collect(),
            separation_exact: Some(format_rational(&sep)),
            unit_residual_exact: Some(format_rational(&residual)),
            degenerate,
        });
    }

    let norms = par::try_map_range(m, |i| ev.norm(space, &vectors[i]))?;
    let residual = norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    let values = par::try_map_range(index.len(), |k| -> Result<f64> {
        let (i, j) = index[k];
        Ok(ev.norm(space, &vectors[i].sub(&vectors[j]))?.min(ev.norm(space, &vectors[i].add(&vectors[j]))?))
    })?;
    let sep = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SeparationCertificate {
        space: space.clone(),
        vectors: vectors.to_vec(),
        separation: sep.min(FLOAT_CAP),
        unit_residual: residual,
        certified: false,
        pairs: index.iter().zip(&values).map(|((i, j), v)| (i + 1, j + 1, *v)).collect(),
        separation_exact: None,
        unit_residual_exact: None,
        degenerate,
    })
}

/// True iff `separation ≥ δ − tol` and `unit_residual ≤ tol`, compared
/// exactly on rational certificates.
pub fn verify_separated(cert: &SeparationCertificate, delta: f64, tol: f64) -> Result<bool> {
    if !(tol >= 0.0) || !delta.is_finite() {
        return Err(Error::Parameter(format!("tolerance {tol} must be ≥ 0 and delta finite")));
    }
    if let (Some(sep), Some(res)) = (&cert.separation_exact, &cert.unit_residual_exact) {
        let sep = parse_decimal(sep).ok_or_else(|| Error::Schema(format!("bad rational {sep:?}")))?;
        let res = parse_decimal(res).ok_or_else(|| Error::Schema(format!("bad rational {res:?}")))?;
        let tol = rational_from_f64(tol);
        return Ok(sep >= rational_from_f64(delta) - &tol && res <= tol);
    }
    Ok(cert.separation >= delta - tol && cert.unit_residual <= tol)
}

/// Best separation found over `k` unit vectors of the truncation to
/// `1..=dim`. Every truncation `d ∈ [k, dim]` is searched with the same
/// seeds, so the value is nondecreasing in `dim` and in the restart count.
pub fn kottman_lower_bound(space: &SpaceSpec, k: usize, dim: usize, budget: &OptBudget) -> Result<SeparationCertificate> {
    space.validate()?;
    budget.validate()?;
    if k < 2 || dim < k {
        return Err(Error::Precondition(format!("need k ≥ 2 and dim ≥ k, got k = {k}, dim = {dim}")));
    }
    let ev = Evaluator::default();
    let jobs: Vec<(usize, usize)> = (k..=dim).flat_map(|d| (0..=budget.restarts).map(move |r| (d, r))).collect();
    let runs = par::try_map_range(jobs.len(), |j| {
        let (d, r) = jobs[j];
        search_frame(&ev, space, k, d, r, budget)
    })?;
    let mut best: Option<(Vec<SparseVec>, (f64, f64))> = None;
    for run in runs {
        if best.as_ref().map_or(true, |b| better(run.1, b.1)) {
            best = Some(run);
        }
    }
    let (vectors, _) = best.expect("at least one run");
    symmetric_separation_with(&ev, space, &vectors, true)
}

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 > b.0 + 1e-15 || (a.0 >= b.0 - 1e-15 && a.1 > b.1 + 1e-15)
}

/// Coordinate ascent on `(min pair value, sum of pair values)` from the
/// unit-vector frame (restart 0) or an orthonormalized Gaussian frame.
fn search_frame(
    ev: &Evaluator,
    space: &SpaceSpec,
    k: usize,
    d: usize,
    r: usize,
    budget: &OptBudget,
) -> Result<(Vec<SparseVec>, (f64, f64))> {
    let mut frame: Vec<Vec<f64>> = if r == 0 {
        (0..k).map(|i| (0..d).map(|c| if c == i { 1.0 } else { 0.0 }).collect()).collect()
    } else {
        let mut rng = budget.with_seed(budget.seed ^ (d as u64) << 32).rng(r - 1);
        gram_schmidt((0..k).map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect())
    };
    let normalize = |x: &[f64]| -> Result<Option<SparseVec>> {
        let v = SparseVec::from_dense(x);
        let n = ev.norm(space, &v)?;
        Ok((n > 0.0 && n.is_finite()).then(|| v.scale(&(1.0 / n))))
    };
    let score = |vs: &[SparseVec]| -> Result<(f64, f64)> {
        let (mut lo, mut sum) = (f64::INFINITY, 0.0);
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                let v = ev.norm(space, &vs[i].sub(&vs[j]))?.min(ev.norm(space, &vs[i].add(&vs[j]))?);
                lo = lo.min(v);
                sum += v;
            }
        }
        Ok((lo, sum))
    };
    let mut vecs = Vec::with_capacity(k);
    for x in &frame {
        match normalize(x)? {
            Some(v) => vecs.push(v),
            None => return Err(Error::Numeric("degenerate search frame".into())),
        }
    }
    for (x, v) in frame.iter_mut().zip(&vecs) {
        *x = v.to_dense(d);
    }
    let mut best = score(&vecs)?;
    if r == 0 {
        return Ok((vecs, best));
    }
    let mut rng = budget.rng(r);
    let mut step = 0.5;
    let mut iters = 0;
    while iters < budget.max_iters && step > budget.tol {
        iters += 1;
        let mut improved = false;
        for i in 0..k {
            for c in 0..d {
                for sgn in [1.0, -1.0] {
                    let mut x = frame[i].clone();
                    x[c] += sgn * step * (1.0 + 0.1 * rng.gen::<f64>());
                    let Some(v) = normalize(&x)? else { continue };
                    let old = std::mem::replace(&mut vecs[i], v);
                    let s = score(&vecs)?;
                    if better(s, best) {
                        best = s;
                        frame[i] = vecs[i].to_dense(d);
                        improved = true;
                    } else {
                        vecs[i] = old;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((vecs, best))
}

fn gram_schmidt(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for i in 0..rows.len() {
        for j in 0..i {
            let p: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            let prev = rows[j].clone();
            for (a, b) in rows[i].iter_mut().zip(&prev) {
                *a -= p * b;
            }
        }
        let n = rows[i].iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 0.0 {
            rows[i].iter_mut().for_each(|a| *a /= n);
        }
    }
    rows
}
