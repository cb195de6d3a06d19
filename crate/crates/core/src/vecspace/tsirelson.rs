//! Tsirelson's space `T` and its dual on finite supports.
//!
//! The norm of `T` is the unique solution of
//!
//! ```text
//! ‖x‖ = max( ‖x‖_∞ , ½ · sup Σⱼ ‖Eⱼ x‖ )
//! ```
//!
//! where the supremum runs over families `k ≤ E₁ < E₂ < … < E_k` of finite
//! sets. The norm is 1-unconditional, so the sets may be taken to be
//! consecutive intervals of the support that together cover everything from
//! the first admissible coordinate on; the dynamic program below uses that
//! reduction and works on positions within the support.

use crate::error::{Error, Result};
use crate::optkit::LinearProgram;
use crate::scalar::Scalar;

use super::SparseVec;

/// Default cap on the largest coordinate index (the work is `O(m⁴)` in the
/// support size for `T` and exponential for `T*`).
pub const DEFAULT_CAP: usize = 16;

/// Default cap on the number of norming functionals generated for `T*`.
pub const DEFAULT_FUNCTIONAL_LIMIT: usize = 200_000;

pub(crate) fn check_cap<S: Scalar>(v: &SparseVec<S>, cap: usize) -> Result<()> {
    if v.max_index() > cap {
        return Err(Error::ResourceLimit {
            what: format!("Tsirelson support reaches index {}", v.max_index()),
            cap,
        });
    }
    Ok(())
}

/// Exact `‖v‖_T` by dynamic programming over (interval, number of pieces).
pub fn tsirelson_norm_with_cap<S: Scalar>(v: &SparseVec<S>, cap: usize) -> Result<S> {
    check_cap(v, cap)?;
    let pos: Vec<usize> = v.support().collect();
    let val: Vec<S> = v.iter().map(|(_, x)| x.abs()).collect();
    let m = pos.len();
    if m == 0 {
        return Ok(S::zero());
    }
    // first[k] = first position whose coordinate index is ≥ k.
    let first: Vec<usize> = (0..=m + 1).map(|k| pos.iter().position(|&p| p >= k).unwrap_or(m)).collect();

    // norm[a][b] = ‖v restricted to positions a..=b‖_T.
    let mut norm: Vec<Vec<S>> = vec![vec![S::zero(); m]; m];
    for b in 0..m {
        // best[k][s]: max Σ over partitions of positions s..=b into k groups.
        let mut best: Vec<Vec<Option<S>>> = vec![vec![None; m + 1]; m + 2];
        for a in (0..=b).rev() {
            let len = b - a + 1;
            for k in 2..=len {
                let mut acc: Option<S> = None;
                for t in a..=(b + 1 - k) {
                    if let Some(rest) = &best[k - 1][t + 1] {
                        let cand = norm[a][t].clone() + rest.clone();
                        acc = Some(match acc {
                            Some(c) => S::max_of(c, cand),
                            None => cand,
                        });
                    }
                }
                best[k][a] = acc;
            }
            let mut value = val[a..=b].iter().cloned().fold(S::zero(), S::max_of);
            for k in 2..=len {
                let s = first[k.min(m + 1)].max(a);
                if s > b || b - s + 1 < k {
                    continue;
                }
                if let Some(sum) = &best[k][s] {
                    value = S::max_of(value, sum.clone() * S::half());
                }
            }
            norm[a][b] = value.clone();
            best[1][a] = Some(value);
        }
    }
    Ok(norm[0][m - 1].clone())
}

/// `‖v‖_T` with the default cap.
pub fn tsirelson_norm<S: Scalar>(v: &SparseVec<S>) -> Result<S> {
    tsirelson_norm_with_cap(v, DEFAULT_CAP)
}

/// Maximal nonnegative norming functionals of `T` restricted to the given
/// coordinates.
///
/// Every returned vector has dyadic entries (exact in `f64`) indexed by
/// position in `coords`, and for nonnegative `x` supported on `coords`,
/// `‖x‖_T = max_g g·x`.
pub fn norming_functionals(coords: &[usize], limit: usize) -> Result<Vec<Vec<f64>>> {
    let m = coords.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    debug_assert!(coords.windows(2).all(|w| w[0] < w[1]));
    let first: Vec<usize> = (0..=m + 1).map(|k| coords.iter().position(|&p| p >= k).unwrap_or(m)).collect();
    let mut gen: Vec<Vec<Vec<Vec<f64>>>> = vec![vec![Vec::new(); m]; m];
    let mut total = 0usize;
    for b in 0..m {
        let mut sums: Vec<Vec<Vec<Vec<f64>>>> = vec![vec![Vec::new(); m + 1]; m + 2];
        for a in (0..=b).rev() {
            let len = b - a + 1;
            for k in 2..=len {
                let mut acc = Vec::new();
                for t in a..=(b + 1 - k) {
                    let rest = &sums[k - 1][t + 1];
                    for g in &gen[a][t] {
                        for h in rest {
                            acc.push(g.iter().zip(h).map(|(x, y)| x + y).collect());
                        }
                    }
                    if acc.len() > limit {
                        return Err(Error::ResourceLimit { what: "Tsirelson norming functionals".into(), cap: limit });
                    }
                }
                sums[k][a] = prune(acc);
            }
            let mut set: Vec<Vec<f64>> = (a..=b)
                .map(|i| {
                    let mut g = vec![0.0; m];
                    g[i] = 1.0;
                    g
                })
                .collect();
            for k in 2..=len {
                let s = first[k.min(m + 1)].max(a);
                if s > b || b - s + 1 < k {
                    continue;
                }
                set.extend(sums[k][s].iter().map(|g| g.iter().map(|x| x * 0.5).collect::<Vec<f64>>()));
            }
            let set = prune(set);
            total += set.len();
            if total > limit {
                return Err(Error::ResourceLimit { what: "Tsirelson norming functionals".into(), cap: limit });
            }
            sums[1][a] = set.clone();
            gen[a][b] = set;
        }
    }
    Ok(std::mem::take(&mut gen[0][m - 1]))
}

/// Keeps the pointwise-maximal vectors, deduplicated, in a canonical order.
fn prune(mut set: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    set.sort_by(|a, b| b.iter().sum::<f64>().total_cmp(&a.iter().sum::<f64>()).then_with(|| cmp_vec(a, b)));
    set.dedup();
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for g in set {
        if !kept.iter().any(|h| h.iter().zip(&g).all(|(x, y)| x >= y)) {
            kept.push(g);
        }
    }
    kept
}

fn cmp_vec(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// `‖f‖_{T*} = max{ Σ|fᵢ|xᵢ : x ≥ 0, g·x ≤ 1 for every norming g }`,
/// solved over the field `S`. Returns the value and a maximizer carrying the
/// signs of `f` (so that pairing it with `f` attains the value).
pub fn dual_tsirelson_norm<S: Scalar>(
    f: &SparseVec<S>,
    functionals: &[Vec<f64>],
) -> Result<(S, SparseVec<S>)> {
    let coords: Vec<usize> = f.support().collect();
    if coords.is_empty() {
        return Ok((S::zero(), SparseVec::zero()));
    }
    let mut lp = LinearProgram::<S>::new();
    for (_, c) in f.iter() {
        let v = lp.add_var(false);
        lp.objective[v] = c.abs();
    }
    for g in functionals {
        let coeffs = g
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, x)| (i, S::from_f64(*x)))
            .collect();
        lp.le(coeffs, S::one());
    }
    let sol = lp.solve()?;
    let mut arg = SparseVec::zero();
    for ((i, c), x) in f.iter().zip(sol.x) {
        arg.set(i, if c.is_negative() { -x } else { x });
    }
    Ok((sol.value, arg))
}
