//! Small dense linear-algebra helpers on top of `nalgebra`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::vecspace::SparseVec;

/// Relative singular-value threshold below which vectors count as dependent.
pub const RANK_TOL: f64 = 1e-10;

/// `Σ coeffs[i]·basis[i]`.
pub fn combine(basis: &[SparseVec], coeffs: &[f64]) -> SparseVec {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for (v, &a) in basis.iter().zip(coeffs) {
        if a == 0.0 {
            continue;
        }
        for (i, x) in v.iter() {
            *acc.entry(i).or_insert(0.0) += a * x;
        }
    }
    SparseVec::from_pairs(acc).expect("indices come from valid vectors")
}

/// Coordinate matrix with one column per vector, rows indexed by the union of
/// the supports (in increasing order).
pub fn coordinate_matrix(vectors: &[SparseVec]) -> (DMatrix<f64>, Vec<usize>) {
    let mut rows: Vec<usize> = vectors.iter().flat_map(|v| v.support()).collect();
    rows.sort_unstable();
    rows.dedup();
    let pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut m = DMatrix::zeros(rows.len(), vectors.len());
    for (c, v) in vectors.iter().enumerate() {
        for (i, x) in v.iter() {
            m[(pos[&i], c)] = *x;
        }
    }
    (m, rows)
}

/// Numerical rank of the coordinate matrix.
pub fn rank(vectors: &[SparseVec]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let (m, rows) = coordinate_matrix(vectors);
    if rows.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Fails with [`Error::Rank`] unless the vectors are linearly independent.
pub fn check_independent(vectors: &[SparseVec]) -> Result<()> {
    if let Some(k) = vectors.iter().position(|v| v.is_zero()) {
        return Err(Error::Rank(format!("vector {} is zero", k + 1)));
    }
    let r = rank(vectors);
    if r < vectors.len() {
        return Err(Error::Rank(format!("{} vectors span a space of dimension {r}", vectors.len())));
    }
    Ok(())
}

/// True when no two vectors share a coordinate.
pub fn disjoint_supports(vectors: &[SparseVec]) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    vectors.iter().all(|v| v.support().all(|i| seen.insert(i)))
}
