//! Dense dictionary-form simplex method over any [`Scalar`] field.
//!
//! The dictionary keeps one row per constraint and one column per original
//! variable, so problems with many constraints and few variables (norming
//! functional families) stay small. Bland's rule is used throughout, which
//! guarantees termination in exact arithmetic.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One constraint `Σ coeffs·x ≤ rhs`.
#[derive(Debug, Clone)]
pub struct LinConstraint<S> {
    pub coeffs: Vec<(usize, S)>,
    pub rhs: S,
}

/// `maximize objective·x` subject to `constraints`, with `x_v ≥ 0` unless
/// `free[v]`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub free: Vec<bool>,
    pub constraints: Vec<LinConstraint<S>>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    pub value: S,
    pub x: Vec<S>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new() -> Self {
        Self { objective: Vec::new(), free: Vec::new(), constraints: Vec::new() }
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, free: bool) -> usize {
        self.objective.push(S::zero());
        self.free.push(free);
        self.free.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.free.len()
    }

    /// Adds `Σ coeffs·x ≤ rhs`.
    pub fn le(&mut self, coeffs: Vec<(usize, S)>, rhs: S) {
        self.constraints.push(LinConstraint { coeffs, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution<S>> {
        solve(self)
    }
}

impl<S: Scalar> Default for LinearProgram<S> {
    fn default() -> Self {
        Self::new()
    }
}

const MAX_PIVOTS: usize = 200_000;

struct Dictionary<S> {
    /// `rows[i][0]` is the constant, `rows[i][k + 1]` the coefficient of nonbasic `k`.
    rows: Vec<Vec<S>>,
    obj: Vec<S>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl<S: Scalar> Dictionary<S> {
    fn pivot(&mut self, r: usize, k: usize) {
        let a = self.rows[r][k + 1].clone();
        let inv = S::one() / a;
        let width = self.nonbasic.len() + 1;
        let mut new_row = Vec::with_capacity(width);
        for j in 0..width {
            if j == k + 1 {
                new_row.push(inv.clone());
            } else {
                new_row.push(-(self.rows[r][j].clone()) * inv.clone());
            }
        }
        let substitute = |row: &mut Vec<S>, new_row: &[S]| {
            let b = row[k + 1].clone();
            if b.is_zero() {
                return;
            }
            for j in 0..width {
                if j == k + 1 {
                    row[j] = b.clone() * new_row[j].clone();
                } else if !new_row[j].is_zero() {
                    let t = b.clone() * new_row[j].clone();
                    row[j] = row[j].clone() + t;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                substitute(row, &new_row);
            }
        }
        substitute(&mut self.obj, &new_row);
        self.rows[r] = new_row;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[k]);
    }

    /// Runs the simplex method on the current objective row: Bland's rule in
    /// exact arithmetic; in floating point, Dantzig's rule with a pivot
    /// tolerance, switching to Bland's rule after a run of degenerate pivots.
    fn optimize(&mut self) -> Result<()> {
        let exact = S::is_exact();
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_PIVOTS {
            let bland = exact || degenerate_run > 50;
            let candidates = (0..self.nonbasic.len()).filter(|&k| self.obj[k + 1].is_pos());
            let entering = if bland {
                candidates.min_by_key(|&k| self.nonbasic[k])
            } else {
                candidates.max_by(|&a, &b| self.obj[a + 1].to_f64().total_cmp(&self.obj[b + 1].to_f64()))
            };
            let Some(k) = entering else {
                return Ok(());
            };
            let leaving = if exact { self.ratio_exact(k) } else { self.ratio_float(k) };
            let Some(r) = leaving else {
                return Err(Error::Unbounded);
            };
            if self.rows[r][0].is_zero() || (!exact && self.rows[r][0].to_f64().abs() <= FLOAT_PIVOT_TOL) {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, k);
        }
        Err(Error::Numeric("simplex pivot limit reached".into()))
    }

    /// Minimum-ratio row for column `k`, ties broken by Bland's rule.
    fn ratio_exact(&self, k: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let c = &row[k + 1];
            if !c.is_neg() {
                continue;
            }
            let ratio = row[0].clone() / (-c.clone());
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let diff = ratio.clone() - br.clone();
                    if diff.is_neg() || (!diff.is_pos() && self.basic[i] < self.basic[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    /// Minimum-ratio row for column `k` among pivots of magnitude above the
    /// tolerance, preferring the largest pivot among near-ties.
    fn ratio_float(&self, k: usize) -> Option<usize> {
        let entries: Vec<(usize, f64, f64)> = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                let c = row[k + 1].to_f64();
                (c < -FLOAT_PIVOT_TOL).then(|| (i, row[0].to_f64().max(0.0) / -c, -c))
            })
            .collect();
        let min = entries.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        let slack = 1e-12 * min.abs().max(1.0);
        entries
            .into_iter()
            .filter(|e| e.1 <= min + slack)
            .max_by(|a, b| a.2.total_cmp(&b.2).then_with(|| self.basic[b.0].cmp(&self.basic[a.0])))
            .map(|e| e.0)
    }
}

/// Smallest pivot magnitude accepted in floating point.
const FLOAT_PIVOT_TOL: f64 = 1e-9;

/// Solves `lp` to optimality.
///
/// Returns [`Error::Infeasible`] or [`Error::Unbounded`] when the problem has
/// no finite optimum.
pub fn solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpSolution<S>> {
    // Column layout: each variable gets a "+" column, free variables also a "-" column.
    let mut plus_col = Vec::with_capacity(lp.num_vars());
    let mut minus_col = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    for &free in &lp.free {
        plus_col.push(ncols);
        ncols += 1;
        if free {
            minus_col.push(Some(ncols));
            ncols += 1;
        } else {
            minus_col.push(None);
        }
    }
    let m = lp.constraints.len();
    let needs_phase1 = lp.constraints.iter().any(|c| c.rhs.is_neg());
    let aux = ncols + m;
    let width = ncols + usize::from(needs_phase1);

    let mut rows = Vec::with_capacity(m);
    for c in &lp.constraints {
        let mut row = vec![S::zero(); width + 1];
        row[0] = c.rhs.clone();
        for (v, a) in &c.coeffs {
            let p = plus_col[*v] + 1;
            row[p] = row[p].clone() - a.clone();
            if let Some(mc) = minus_col[*v] {
                row[mc + 1] = row[mc + 1].clone() + a.clone();
            }
        }
        if needs_phase1 {
            row[width] = S::one();
        }
        rows.push(row);
    }
    let mut nonbasic: Vec<usize> = (0..ncols).collect();
    if needs_phase1 {
        nonbasic.push(aux);
    }
    let mut dict = Dictionary {
        rows,
        obj: vec![S::zero(); width + 1],
        basic: (ncols..ncols + m).collect(),
        nonbasic,
    };

    if needs_phase1 {
        dict.obj[width] = -S::one();
        let worst = (0..m)
            .min_by(|&a, &b| {
                dict.rows[a][0].partial_cmp(&dict.rows[b][0]).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("phase one implies at least one constraint");
        dict.pivot(worst, width - 1);
        dict.optimize()?;
        if dict.obj[0].is_neg() {
            return Err(Error::Infeasible);
        }
        if let Some(r) = dict.basic.iter().position(|&b| b == aux) {
            let k = (0..dict.nonbasic.len())
                .filter(|&k| !dict.rows[r][k + 1].is_zero())
                .max_by(|&a, &b| {
                    dict.rows[r][a + 1]
                        .abs()
                        .partial_cmp(&dict.rows[r][b + 1].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            match k {
                Some(k) => dict.pivot(r, k),
                None => {
                    // Row reads aux = const; feasibility gives const = 0, drop it.
                    dict.rows.remove(r);
                    dict.basic.remove(r);
                }
            }
        }
        let k = dict.nonbasic.iter().position(|&n| n == aux).expect("aux is nonbasic");
        for row in dict.rows.iter_mut() {
            row.remove(k + 1);
        }
        dict.nonbasic.remove(k);
    }

    // Phase-two objective in terms of the current nonbasic variables.
    let mut col_obj = vec![S::zero(); ncols];
    for v in 0..lp.num_vars() {
        col_obj[plus_col[v]] = lp.objective[v].clone();
        if let Some(mc) = minus_col[v] {
            col_obj[mc] = -lp.objective[v].clone();
        }
    }
    let width = dict.nonbasic.len();
    let mut obj = vec![S::zero(); width + 1];
    for (k, &label) in dict.nonbasic.iter().enumerate() {
        if label < ncols {
            obj[k + 1] = col_obj[label].clone();
        }
    }
    for (i, &label) in dict.basic.iter().enumerate() {
        if label < ncols && !col_obj[label].is_zero() {
            let c = col_obj[label].clone();
            for j in 0..=width {
                if !dict.rows[i][j].is_zero() {
                    obj[j] = obj[j].clone() + c.clone() * dict.rows[i][j].clone();
                }
            }
        }
    }
    dict.obj = obj;
    dict.optimize()?;

    let mut cols = vec![S::zero(); ncols];
    for (i, &label) in dict.basic.iter().enumerate() {
        if label < ncols {
            cols[label] = dict.rows[i][0].clone();
        }
    }
    let x = (0..lp.num_vars())
        .map(|v| {
            let p = cols[plus_col[v]].clone();
            match minus_col[v] {
                Some(mc) => p - cols[mc].clone(),
                None => p,
            }
        })
        .collect();
    Ok(LpSolution { value: dict.obj[0].clone(), x })
}
