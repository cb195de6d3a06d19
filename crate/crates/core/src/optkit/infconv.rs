//! `inf_x ‖x‖_a + s·‖y − Tx‖_b` over finitely many columns of `T`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{OptBudget, OptResult};
use crate::error::{Error, Result};
use crate::linalg::{combine, coordinate_matrix};
use crate::par;
use crate::vecspace::{Evaluator, SpaceSpec, SparseVec};

/// How the first term measures the coefficient vector `x`.
#[derive(Debug, Clone, Copy)]
pub enum IcTerm<'a> {
    /// `‖x‖_a` on the coefficients themselves (`x = Σ xⱼeⱼ`).
    Coefficients(&'a SpaceSpec),
    /// `‖Tx‖_a`, the norm of the image.
    Mapped(&'a SpaceSpec),
}

/// An infimal-convolution problem `inf_x first(x) + second_scale·‖y − Tx‖_second`.
#[derive(Debug, Clone, Copy)]
pub struct InfConv<'a> {
    pub first: IcTerm<'a>,
    /// Columns `T eⱼ`.
    pub map: &'a [SparseVec],
    pub second: &'a SpaceSpec,
    pub second_scale: f64,
}

/// Evaluates the infimal convolution at `y` using the first `support_budget`
/// columns. Exact (and certified) when both norms are polyhedral; otherwise
/// subgradient descent plus pattern search from several starts, returning an
/// upper bound on the infimum.
pub fn infimal_convolution(
    ev: &Evaluator,
    problem: &InfConv<'_>,
    y: &SparseVec,
    support_budget: usize,
    budget: &OptBudget,
) -> Result<OptResult> {
    budget.validate()?;
    if support_budget == 0 || support_budget > problem.map.len() {
        return Err(Error::Budget(format!(
            "support budget {support_budget} outside 1..={}",
            problem.map.len()
        )));
    }
    if !(problem.second_scale > 0.0) || !problem.second_scale.is_finite() {
        return Err(Error::Parameter(format!("scale {} must be positive", problem.second_scale)));
    }
    for (j, col) in problem.map.iter().enumerate().skip(support_budget) {
        if let Some(i) = col.support().find(|&i| y.get(i) != 0.0) {
            return Err(Error::Budget(format!(
                "coordinate {i} of the input meets column {} beyond the support budget {support_budget}",
                j + 1
            )));
        }
    }
    if let Some((value, coeffs)) = ev.infconv_lp::<f64>(problem, y, support_budget)? {
        return Ok(OptResult::exact(value, coeffs));
    }
    heuristic(ev, problem, y, &problem.map[..support_budget], budget)
}

fn heuristic(
    ev: &Evaluator,
    problem: &InfConv<'_>,
    y: &SparseVec,
    cols: &[SparseVec],
    budget: &OptBudget,
) -> Result<OptResult> {
    let m = cols.len();
    let objective = |c: &[f64]| -> Result<f64> {
        let image = combine(cols, c);
        let a = match problem.first {
            IcTerm::Coefficients(s) => ev.norm(s, &SparseVec::from_dense(c))?,
            IcTerm::Mapped(s) => ev.norm(s, &image)?,
        };
        let b = ev.norm(problem.second, &y.sub(&image))?;
        let v = a + problem.second_scale * b;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("infimal convolution objective returned {v}")))
        }
    };
    let ls = least_squares(cols, y);
    let scale = ls.iter().map(|x| x * x).sum::<f64>().sqrt().max(y.l2()).max(1e-12);

    let runs = par::try_map_range(budget.restarts, |r| -> Result<(Vec<f64>, f64)> {
        let mut rng = budget.rng(r);
        let mut c: Vec<f64> = match r {
            0 => vec![0.0; m],
            1 => ls.clone(),
            _ => (0..m).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect(),
        };
        let mut val = objective(&c)?;
        let (mut best_c, mut best) = (c.clone(), val);

        let sub_iters = budget.max_iters / 2;
        let h = 1e-7 * scale;
        for k in 1..=sub_iters {
            let mut g = vec![0.0; m];
            for j in 0..m {
                let mut cp = c.clone();
                cp[j] += h;
                let mut cm = c.clone();
                cm[j] -= h;
                g[j] = (objective(&cp)? - objective(&cm)?) / (2.0 * h);
            }
            let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gn < 1e-14 {
                break;
            }
            let step = 0.5 * scale / (k as f64).sqrt();
            for j in 0..m {
                c[j] -= step * g[j] / gn;
            }
            val = objective(&c)?;
            if val < best {
                best = val;
                best_c.clone_from(&c);
            }
        }

        let mut step = 0.25 * scale;
        let mut iters = sub_iters;
        while iters < budget.max_iters && step > budget.tol * scale.max(1.0) {
            iters += 1;
            let mut improved = false;
            let rd: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let rn = rd.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(2 * m + 2);
            for j in 0..m {
                for sgn in [1.0, -1.0] {
                    let mut d = vec![0.0; m];
                    d[j] = sgn;
                    dirs.push(d);
                }
            }
            dirs.push(rd.iter().map(|x| x / rn).collect());
            dirs.push(rd.iter().map(|x| -x / rn).collect());
            for d in &dirs {
                let cand: Vec<f64> = best_c.iter().zip(d).map(|(x, e)| x + step * e).collect();
                let v = objective(&cand)?;
                if v < best {
                    best = v;
                    best_c = cand;
                    improved = true;
                    break;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok((best_c, best))
    })?;

    let mut out: Option<(Vec<f64>, f64)> = None;
    for run in runs {
        if out.as_ref().map_or(true, |b| run.1 < b.1) {
            out = Some(run);
        }
    }
    let (c, v) = out.expect("at least one restart");
    Ok(OptResult::heuristic(v, c))
}

/// Least-squares coefficients of `y` against `cols`.
fn least_squares(cols: &[SparseVec], y: &SparseVec) -> Vec<f64> {
    let mut all = cols.to_vec();
    all.push(y.clone());
    let (mat, _) = coordinate_matrix(&all);
    let m = cols.len();
    let a: DMatrix<f64> = mat.columns(0, m).into_owned();
    let b: DVector<f64> = mat.column(m).into_owned();
    match a.svd(true, true).solve(&b, 1e-12) {
        Ok(x) => x.iter().copied().collect(),
        Err(_) => vec![0.0; m],
    }
}
