use crate::error::{Error, Result};

use super::OptResult;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a convex function on `[lo, hi]`.
///
/// The returned value is the objective at the returned argument, so it is an
/// upper bound on the minimum and within `tol` of it for convex `g`
/// (assuming `g` is Lipschitz with constant of order one on the bracket).
pub fn minimize_1d_convex<G>(g: G, bracket: (f64, f64), tol: f64) -> Result<OptResult>
where
    G: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = bracket;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Parameter(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("tol must be positive".into()));
    }
    let eval = |t: f64| -> Result<f64> {
        let v = g(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("objective is {v} at t = {t}")))
        }
    };
    let mut best = (lo, eval(lo)?);
    let consider = |best: &mut (f64, f64), t: f64, v: f64| {
        if v < best.1 {
            *best = (t, v);
        }
    };
    let fhi = eval(hi)?;
    consider(&mut best, hi, fhi);

    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = eval(a)?;
    let mut fb = eval(b)?;
    // Interval shrinks by 0.618 per step; 200 steps reach below f64 resolution.
    for _ in 0..200 {
        if hi - lo <= tol * 1e-3 {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = eval(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = eval(b)?;
        }
        consider(&mut best, a, fa);
        consider(&mut best, b, fb);
    }
    Ok(OptResult::heuristic(best.1, vec![best.0]))
}
