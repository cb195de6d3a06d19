use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_independent, combine};
use crate::par;
use crate::vecspace::SparseVec;

use super::{OptBudget, OptResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Max => a > b,
            Direction::Min => a < b,
        }
    }
}

/// Multistart projected pattern search over the unit sphere
/// `{Σ aᵢyᵢ : ‖Σ aᵢyᵢ‖ = 1}` of `span(span_basis)`.
///
/// `objective` receives the normalized coefficients and the normalized point.
/// Restart `r` starts from normalized Gaussian coefficients drawn from an
/// independent stream, so adding restarts never worsens the result. The
/// returned value is the objective at a feasible point (`certified = false`).
pub fn sphere_optimize<N, O>(
    norm: N,
    span_basis: &[SparseVec],
    objective: O,
    direction: Direction,
    budget: &OptBudget,
) -> Result<OptResult>
where
    N: Fn(&SparseVec) -> Result<f64> + Sync + Send,
    O: Fn(&[f64], &SparseVec) -> Result<f64> + Sync + Send,
{
    sphere_optimize_with_starts(norm, span_basis, objective, direction, budget, &[])
}

/// As [`sphere_optimize`], with additional deterministic starting
/// coefficients evaluated before the random restarts.
pub fn sphere_optimize_with_starts<N, O>(
    norm: N,
    span_basis: &[SparseVec],
    objective: O,
    direction: Direction,
    budget: &OptBudget,
    starts: &[Vec<f64>],
) -> Result<OptResult>
where
    N: Fn(&SparseVec) -> Result<f64> + Sync + Send,
    O: Fn(&[f64], &SparseVec) -> Result<f64> + Sync + Send,
{
    budget.validate()?;
    if span_basis.is_empty() {
        return Err(Error::Precondition("empty span basis".into()));
    }
    check_independent(span_basis)?;
    let m = span_basis.len();
    if let Some(s) = starts.iter().find(|s| s.len() != m) {
        return Err(Error::Precondition(format!("start of length {} for a span of dimension {m}", s.len())));
    }

    let eval = |a: &[f64]| -> Result<Option<(Vec<f64>, f64)>> {
        let x = combine(span_basis, a);
        let n = norm(&x)?;
        if !(n > 0.0) || !n.is_finite() {
            return Ok(None);
        }
        let a: Vec<f64> = a.iter().map(|c| c / n).collect();
        let x = x.scale(&(1.0 / n));
        let v = objective(&a, &x)?;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("objective returned {v}")));
        }
        Ok(Some((a, v)))
    };

    let total = starts.len() + budget.restarts;
    let runs = par::try_map_range(total, |r| -> Result<Option<(Vec<f64>, f64)>> {
        let mut rng = budget.rng(r);
        let a0: Vec<f64> = if r < starts.len() {
            starts[r].clone()
        } else {
            (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let Some((mut a, mut val)) = eval(&a0)? else {
            return Ok(None);
        };
        let mut step = 0.5 * l2(&a).max(f64::MIN_POSITIVE);
        let floor = budget.tol * l2(&a).max(1.0);
        let mut iters = 0;
        while iters < budget.max_iters && step > floor {
            iters += 1;
            let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(2 * m + 2);
            for k in 0..m {
                for sgn in [1.0, -1.0] {
                    let mut d = vec![0.0; m];
                    d[k] = sgn;
                    dirs.push(d);
                }
            }
            let rd: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let rn = l2(&rd).max(f64::MIN_POSITIVE);
            dirs.push(rd.iter().map(|x| x / rn).collect());
            dirs.push(rd.iter().map(|x| -x / rn).collect());

            let mut best: Option<(Vec<f64>, f64)> = None;
            for d in &dirs {
                let cand: Vec<f64> = a.iter().zip(d).map(|(x, y)| x + step * y).collect();
                if let Some((ca, cv)) = eval(&cand)? {
                    let reference = best.as_ref().map_or(val, |b| b.1);
                    if direction.better(cv, reference) {
                        best = Some((ca, cv));
                    }
                }
            }
            match best {
                Some((ca, cv)) => {
                    a = ca;
                    val = cv;
                }
                None => step *= 0.5,
            }
        }
        Ok(Some((a, val)))
    })?;

    let mut best: Option<(Vec<f64>, f64)> = None;
    for run in runs.into_iter().flatten() {
        if best.as_ref().map_or(true, |b| direction.better(run.1, b.1)) {
            best = Some(run);
        }
    }
    let (a, v) = best.ok_or_else(|| Error::Numeric("no restart produced a finite point".into()))?;
    Ok(OptResult::heuristic(v, a))
}

fn l2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
