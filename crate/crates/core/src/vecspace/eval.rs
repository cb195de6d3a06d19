//! Norm and dual-norm oracles.
//!
//! [`Evaluator`] dispatches over [`SpaceSpec`]. Every polyhedral space (ℓ1,
//! ℓ∞, c0, `T`, `T*` and renormings built from them without the quadratic
//! layer) also has a generic path over any [`Scalar`], used with exact
//! rationals for certificates.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::optkit::{infimal_convolution, IcTerm, InfConv, LinearProgram, OptBudget};
use crate::renorm::RenormSpec;
use crate::scalar::{Rational, Scalar};

use super::tsirelson::{self, check_cap, dual_tsirelson_norm, norming_functionals, tsirelson_norm_with_cap};
use super::{Functional, SpaceSpec, SparseVec, TsirelsonVariant};

/// Tunables for norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConfig {
    /// Largest coordinate index accepted by the Tsirelson oracles.
    pub tsirelson_cap: usize,
    /// Largest number of norming functionals generated for `T*`.
    pub functional_limit: usize,
    /// Budget for infimal convolutions over non-polyhedral bases.
    pub ic_budget: OptBudget,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self {
            tsirelson_cap: tsirelson::DEFAULT_CAP,
            functional_limit: tsirelson::DEFAULT_FUNCTIONAL_LIMIT,
            ic_budget: OptBudget { restarts: 4, max_iters: 400, tol: 1e-10, seed: 0 },
        }
    }
}

/// A norm value and whether it came from an exact path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub certified: bool,
}

/// Norm oracle with a shared cache of `T` norming functionals.
#[derive(Debug, Default)]
pub struct Evaluator {
    config: NormConfig,
    norming_cache: RwLock<HashMap<Vec<usize>, Arc<Vec<Vec<f64>>>>>,
}

impl Clone for Evaluator {
    fn clone(&self) -> Self {
        Self::new(self.config)
    }
}

/// Affine expression over LP variables.
#[derive(Debug, Clone)]
pub(crate) struct Affine<S> {
    terms: Vec<(usize, S)>,
    constant: S,
}

impl<S: Scalar> Affine<S> {
    fn constant(c: S) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    fn var(v: usize) -> Self {
        Self { terms: vec![(v, S::one())], constant: S::zero() }
    }

    fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(mut self, other: &Self) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self.constant = self.constant + other.constant.clone();
        self
    }

    fn add_scaled(mut self, a: &S, other: &Self) -> Self {
        if a.is_zero() {
            return self;
        }
        self.terms.extend(other.terms.iter().map(|(v, c)| (*v, c.clone() * a.clone())));
        self.constant = self.constant + other.constant.clone() * a.clone();
        self
    }

    fn scale(&self, a: &S) -> Self {
        Self::constant(S::zero()).add_scaled(a, self)
    }

    /// Adds the constraint `self ≤ rhs` to `lp`.
    fn le(&self, lp: &mut LinearProgram<S>, rhs: S) {
        lp.le(self.terms.clone(), rhs - self.constant.clone());
    }
}

type AffineMap<S> = BTreeMap<usize, Affine<S>>;

impl Evaluator {
    pub fn new(config: NormConfig) -> Self {
        Self { config, norming_cache: RwLock::new(HashMap::new()) }
    }

    pub fn config(&self) -> &NormConfig {
        &self.config
    }

    /// `‖v‖` in `space`.
    pub fn norm(&self, space: &SpaceSpec, v: &SparseVec) -> Result<f64> {
        Ok(self.eval(space, v)?.value)
    }

    /// `‖v‖` with a flag telling whether an exact path produced it.
    pub fn eval(&self, space: &SpaceSpec, v: &SparseVec) -> Result<NormValue> {
        if !v.all_finite() {
            return Err(Error::Numeric("vector has non-finite entries".into()));
        }
        let exact = |value: f64| Ok(NormValue { value, certified: true });
        match space {
            SpaceSpec::Lp { p } => {
                if p.0.is_nan() || p.0 < 1.0 {
                    return Err(Error::InvalidSpace(format!("p = {} is below 1", p.0)));
                }
                exact(lp_norm_f64(v, p.0))
            }
            SpaceSpec::C0 => exact(lp_norm_f64(v, f64::INFINITY)),
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::T } => {
                exact(tsirelson_norm_with_cap(v, self.config.tsirelson_cap)?)
            }
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::Tstar } => exact(self.tstar_norm(v)?.0),
            SpaceSpec::Renormed { base, renorm } => match &**renorm {
                RenormSpec::Diagonal { weights } => self.eval(base, &apply_weights(weights, v)),
                RenormSpec::MaxBiortho { epsilon, functionals } => {
                    renorm.validate()?;
                    let b = self.eval(base, v)?;
                    let pairs = top_two_sum(functionals.iter().map(|f| f.apply(v).abs()));
                    Ok(NormValue { value: (b.value / (1.0 + epsilon)).max(pairs), certified: b.certified })
                }
                RenormSpec::StrictConvex { delta, functionals, .. } => {
                    renorm.validate()?;
                    self.check_dual_ball(base, functionals)?;
                    let b = self.eval(base, v)?;
                    let q: f64 = functionals
                        .iter()
                        .enumerate()
                        .map(|(n, f)| 0.5f64.powi(n as i32 + 1) * f.apply(v).powi(2))
                        .sum();
                    Ok(NormValue { value: (b.value * b.value + delta * q).sqrt(), certified: b.certified })
                }
                RenormSpec::JamesIc { .. } | RenormSpec::IcExtension { .. } => {
                    renorm.validate()?;
                    if self.is_polyhedral(space) {
                        exact(self.lp_norm::<f64>(space, v)?)
                    } else {
                        let r = self.ic_heuristic(base, renorm, v)?;
                        Ok(NormValue { value: r, certified: false })
                    }
                }
            },
        }
    }

    /// Norm over the field `S`, or `None` when the space is not polyhedral.
    pub fn poly_norm<S: Scalar>(&self, space: &SpaceSpec, v: &SparseVec<S>) -> Result<Option<S>> {
        match space {
            SpaceSpec::Lp { p } if p.0 == 1.0 => Ok(Some(v.iter().fold(S::zero(), |a, (_, x)| a + x.abs()))),
            SpaceSpec::Lp { p } if p.is_infinite() => Ok(Some(max_abs(v))),
            SpaceSpec::Lp { .. } => Ok(None),
            SpaceSpec::C0 => Ok(Some(max_abs(v))),
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::T } => {
                Ok(Some(tsirelson_norm_with_cap(v, self.config.tsirelson_cap)?))
            }
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::Tstar } => Ok(Some(self.tstar_norm(v)?.0)),
            SpaceSpec::Renormed { base, renorm } => match &**renorm {
                RenormSpec::Diagonal { weights } => self.poly_norm(base, &apply_weights(weights, v)),
                RenormSpec::MaxBiortho { epsilon, functionals } => {
                    renorm.validate()?;
                    let Some(b) = self.poly_norm(base, v)? else {
                        return Ok(None);
                    };
                    let pairs = top_two_sum(functionals.iter().map(|f| pair_generic(f, v).abs()));
                    let scaled = b / (S::one() + S::from_f64(*epsilon));
                    Ok(Some(S::max_of(scaled, pairs)))
                }
                RenormSpec::StrictConvex { .. } => Ok(None),
                RenormSpec::JamesIc { .. } | RenormSpec::IcExtension { .. } => {
                    renorm.validate()?;
                    if self.is_polyhedral(space) {
                        Ok(Some(self.lp_norm(space, v)?))
                    } else {
                        Ok(None)
                    }
                }
            },
        }
    }

    /// Exact rational norm, or `None` when no exact path exists.
    pub fn norm_exact(&self, space: &SpaceSpec, v: &SparseVec<Rational>) -> Result<Option<Rational>> {
        self.poly_norm(space, v)
    }

    /// Whether `space` has an exact (polyhedral) path.
    pub fn is_polyhedral(&self, space: &SpaceSpec) -> bool {
        match space {
            SpaceSpec::Lp { p } => p.0 == 1.0 || p.is_infinite(),
            SpaceSpec::C0 | SpaceSpec::Tsirelson { .. } => true,
            SpaceSpec::Renormed { base, renorm } => match &**renorm {
                RenormSpec::StrictConvex { .. } => false,
                RenormSpec::IcExtension { inner, .. } => self.is_polyhedral(base) && self.is_polyhedral(inner),
                _ => self.is_polyhedral(base),
            },
        }
    }

    /// `‖f‖_* = sup{ f(x) : ‖x‖ ≤ 1 }`.
    pub fn dual_norm(&self, space: &SpaceSpec, f: &Functional) -> Result<f64> {
        match space {
            SpaceSpec::Lp { p } => {
                if p.0.is_nan() || p.0 < 1.0 {
                    return Err(Error::InvalidSpace(format!("p = {} is below 1", p.0)));
                }
                Ok(lp_norm_f64(&f.0, p.conjugate().0))
            }
            SpaceSpec::Renormed { base, renorm } if matches!(**renorm, RenormSpec::Diagonal { .. }) && !self.is_polyhedral(base) => {
                let RenormSpec::Diagonal { weights } = &**renorm else { unreachable!() };
                let inverse: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
                self.dual_norm(base, &Functional(apply_weights(&inverse, &f.0)))
            }
            _ => match self.dual_norm_poly::<f64>(space, &f.0)? {
                Some((value, _)) => Ok(value),
                None => Err(Error::Unsupported(format!("dual norm of {space}"))),
            },
        }
    }

    /// Dual norm over the field `S` together with a maximizer `x`
    /// (`‖x‖ = 1`, `f(x) = ‖f‖_*`), or `None` for non-polyhedral spaces.
    pub fn dual_norm_poly<S: Scalar>(
        &self,
        space: &SpaceSpec,
        f: &SparseVec<S>,
    ) -> Result<Option<(S, SparseVec<S>)>> {
        if f.is_zero() {
            return Ok(Some((S::zero(), SparseVec::zero())));
        }
        match space {
            SpaceSpec::Lp { p } if p.0 == 1.0 => {
                let (i, x) = f
                    .iter()
                    .fold(None::<(usize, S)>, |best, (i, x)| match best {
                        Some((_, ref b)) if x.abs() <= *b => best,
                        _ => Some((i, x.abs())),
                    })
                    .expect("f is nonzero");
                let sign = if f.get(i).is_negative() { -S::one() } else { S::one() };
                let mut arg = SparseVec::zero();
                arg.set(i, sign);
                Ok(Some((x, arg)))
            }
            SpaceSpec::Lp { p } if p.is_infinite() => Ok(Some(l1_dual(f))),
            SpaceSpec::C0 => Ok(Some(l1_dual(f))),
            SpaceSpec::Lp { .. } => Ok(None),
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::T } => {
                check_cap(f, self.config.tsirelson_cap)?;
                let coords: Vec<usize> = f.support().collect();
                let w = self.norming_set(&coords)?;
                Ok(Some(dual_tsirelson_norm(f, &w)?))
            }
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::Tstar } => {
                check_cap(f, self.config.tsirelson_cap)?;
                let coords: Vec<usize> = f.support().collect();
                let w = self.norming_set(&coords)?;
                let abs: Vec<S> = f.iter().map(|(_, x)| x.abs()).collect();
                let mut best: Option<(S, &Vec<f64>)> = None;
                for g in w.iter() {
                    let val = g.iter().zip(&abs).fold(S::zero(), |a, (gi, x)| a + S::from_f64(*gi) * x.clone());
                    if best.as_ref().map_or(true, |(b, _)| val > *b) {
                        best = Some((val, g));
                    }
                }
                let (val, g) = best.expect("norming set is nonempty");
                let mut arg = SparseVec::zero();
                for ((i, x), gi) in f.iter().zip(g) {
                    let gi = S::from_f64(*gi);
                    arg.set(i, if x.is_negative() { -gi } else { gi });
                }
                Ok(Some((val, arg)))
            }
            SpaceSpec::Renormed { .. } => {
                if !self.is_polyhedral(space) {
                    return Ok(None);
                }
                let mut coords: Vec<usize> = f.support().collect();
                coords.extend(space.touched_coords());
                coords.sort_unstable();
                coords.dedup();
                let mut lp = LinearProgram::<S>::new();
                let mut z = AffineMap::new();
                let mut vars = Vec::new();
                for &c in &coords {
                    let v = lp.add_var(true);
                    lp.objective[v] = f.get(c);
                    z.insert(c, Affine::var(v));
                    vars.push((c, v));
                }
                let e = self
                    .epigraph(&mut lp, space, &z)?
                    .ok_or_else(|| Error::Unsupported(format!("epigraph of {space}")))?;
                e.le(&mut lp, S::one());
                let sol = lp.solve()?;
                let mut arg = SparseVec::zero();
                for (c, v) in vars {
                    arg.set(c, sol.x[v].clone());
                }
                Ok(Some((sol.value, arg)))
            }
        }
    }

    /// Maximal nonnegative norming functionals of `T` on `coords` (cached).
    pub fn norming_set(&self, coords: &[usize]) -> Result<Arc<Vec<Vec<f64>>>> {
        if let Some(w) = self.norming_cache.read().expect("cache lock").get(coords) {
            return Ok(Arc::clone(w));
        }
        let w = Arc::new(norming_functionals(coords, self.config.functional_limit)?);
        self.norming_cache.write().expect("cache lock").insert(coords.to_vec(), Arc::clone(&w));
        Ok(w)
    }

    fn tstar_norm<S: Scalar>(&self, v: &SparseVec<S>) -> Result<(S, SparseVec<S>)> {
        check_cap(v, self.config.tsirelson_cap)?;
        let coords: Vec<usize> = v.support().collect();
        let w = self.norming_set(&coords)?;
        dual_tsirelson_norm(v, &w)
    }

    fn check_dual_ball(&self, base: &SpaceSpec, functionals: &[Functional]) -> Result<()> {
        for (n, f) in functionals.iter().enumerate() {
            let d = self.dual_norm(base, f)?;
            if d > 1.0 + 1e-9 {
                return Err(Error::Premise(format!(
                    "functional {} has dual norm {d} > 1 in {base}",
                    n + 1
                )));
            }
        }
        Ok(())
    }

    /// Minimizes the epigraph expression of a polyhedral space at `v`.
    fn lp_norm<S: Scalar>(&self, space: &SpaceSpec, v: &SparseVec<S>) -> Result<S> {
        let mut lp = LinearProgram::<S>::new();
        let z: AffineMap<S> = v.iter().map(|(i, x)| (i, Affine::constant(x.clone()))).collect();
        let e = self
            .epigraph(&mut lp, space, &z)?
            .ok_or_else(|| Error::Unsupported(format!("epigraph of {space}")))?;
        if e.is_constant() {
            return Ok(e.constant);
        }
        for (var, c) in &e.terms {
            lp.objective[*var] = lp.objective[*var].clone() - c.clone();
        }
        let sol = lp.solve()?;
        Ok(e.constant - sol.value)
    }

    /// Adds variables and constraints to `lp` and returns an affine
    /// expression `E` with `E ≥ ‖z‖` on the feasible set and `min E = ‖z‖`.
    pub(crate) fn epigraph<S: Scalar>(
        &self,
        lp: &mut LinearProgram<S>,
        space: &SpaceSpec,
        z: &AffineMap<S>,
    ) -> Result<Option<Affine<S>>> {
        match space {
            SpaceSpec::Lp { p } if p.0 == 1.0 => {
                let mut out = Affine::constant(S::zero());
                for zc in z.values() {
                    out = out.add(&abs_bound(lp, zc));
                }
                Ok(Some(out))
            }
            SpaceSpec::Lp { p } if p.is_infinite() => Ok(Some(sup_bound(lp, z.values()))),
            SpaceSpec::Lp { .. } => Ok(None),
            SpaceSpec::C0 => Ok(Some(sup_bound(lp, z.values()))),
            SpaceSpec::Tsirelson { variant } => {
                let coords: Vec<usize> = z.keys().copied().collect();
                if let Some(&last) = coords.last() {
                    if last > self.config.tsirelson_cap {
                        return Err(Error::ResourceLimit {
                            what: format!("Tsirelson support reaches index {last}"),
                            cap: self.config.tsirelson_cap,
                        });
                    }
                }
                let w = self.norming_set(&coords)?;
                let abs: Vec<Affine<S>> = z.values().map(|zc| abs_bound(lp, zc)).collect();
                match variant {
                    TsirelsonVariant::T => {
                        let tau = lp.add_var(false);
                        for g in w.iter() {
                            let mut e = Affine::constant(S::zero());
                            for (gi, a) in g.iter().zip(&abs) {
                                e = e.add_scaled(&S::from_f64(*gi), a);
                            }
                            e.add_scaled(&-S::one(), &Affine::var(tau)).le(lp, S::zero());
                        }
                        Ok(Some(Affine::var(tau)))
                    }
                    TsirelsonVariant::Tstar => {
                        let lambdas: Vec<usize> = w.iter().map(|_| lp.add_var(false)).collect();
                        for (pos, a) in abs.iter().enumerate() {
                            let mut e = a.clone();
                            for (g, &l) in w.iter().zip(&lambdas) {
                                if g[pos] != 0.0 {
                                    e = e.add_scaled(&-S::from_f64(g[pos]), &Affine::var(l));
                                }
                            }
                            e.le(lp, S::zero());
                        }
                        let mut out = Affine::constant(S::zero());
                        for l in lambdas {
                            out = out.add(&Affine::var(l));
                        }
                        Ok(Some(out))
                    }
                }
            }
            SpaceSpec::Renormed { base, renorm } => match &**renorm {
                RenormSpec::Diagonal { weights } => {
                    let scaled: AffineMap<S> = z
                        .iter()
                        .map(|(c, e)| (*c, e.scale(&S::from_f64(weight(weights, *c)))))
                        .collect();
                    self.epigraph(lp, base, &scaled)
                }
                RenormSpec::MaxBiortho { epsilon, functionals } => {
                    let Some(b) = self.epigraph(lp, base, z)? else {
                        return Ok(None);
                    };
                    let t = lp.add_var(true);
                    let inv = S::one() / (S::one() + S::from_f64(*epsilon));
                    b.scale(&inv).add_scaled(&-S::one(), &Affine::var(t)).le(lp, S::zero());
                    // Sum of the two largest |φᵢ|: t ≥ 2u + Σ vᵢ with vᵢ ≥ |φᵢ| − u.
                    let u = lp.add_var(true);
                    let mut total = Affine::var(u).scale(&S::from_usize(2));
                    for f in functionals {
                        let mut phi = Affine::constant(S::zero());
                        for (c, fc) in f.0.iter() {
                            if let Some(zc) = z.get(&c) {
                                phi = phi.add_scaled(&S::from_f64(*fc), zc);
                            }
                        }
                        let v = lp.add_var(false);
                        let slack = Affine::var(u).add(&Affine::var(v));
                        phi.clone().add_scaled(&-S::one(), &slack).le(lp, S::zero());
                        phi.scale(&-S::one()).add_scaled(&-S::one(), &slack).le(lp, S::zero());
                        total = total.add(&Affine::var(v));
                    }
                    total.add_scaled(&-S::one(), &Affine::var(t)).le(lp, S::zero());
                    Ok(Some(Affine::var(t)))
                }
                RenormSpec::StrictConvex { .. } => Ok(None),
                RenormSpec::JamesIc { blocks, support_budget } => {
                    let mut out = Affine::constant(S::zero());
                    let mut residual = z.clone();
                    for block in blocks.iter().take(*support_budget) {
                        let x = lp.add_var(true);
                        out = out.add(&abs_bound(lp, &Affine::var(x)));
                        for (c, bc) in block.iter() {
                            let entry = residual.remove(&c).unwrap_or_else(|| Affine::constant(S::zero()));
                            residual.insert(c, entry.add_scaled(&-S::from_f64(*bc), &Affine::var(x)));
                        }
                    }
                    let Some(e) = self.epigraph(lp, base, &residual)? else {
                        return Ok(None);
                    };
                    Ok(Some(out.add(&e)))
                }
                RenormSpec::IcExtension { subspace_basis, inner, b, support_budget } => {
                    let n = support_budget.unwrap_or(subspace_basis.len()).min(subspace_basis.len());
                    let mut y = AffineMap::new();
                    let mut residual = z.clone();
                    for u in subspace_basis.iter().take(n) {
                        let c = lp.add_var(true);
                        for (i, ui) in u.iter() {
                            let ui = S::from_f64(*ui);
                            let e = y.remove(&i).unwrap_or_else(|| Affine::constant(S::zero()));
                            y.insert(i, e.add_scaled(&ui, &Affine::var(c)));
                            let r = residual.remove(&i).unwrap_or_else(|| Affine::constant(S::zero()));
                            residual.insert(i, r.add_scaled(&-ui, &Affine::var(c)));
                        }
                    }
                    let Some(e1) = self.epigraph(lp, inner, &y)? else {
                        return Ok(None);
                    };
                    let Some(e2) = self.epigraph(lp, base, &residual)? else {
                        return Ok(None);
                    };
                    Ok(Some(e1.add_scaled(&S::from_f64(*b), &e2)))
                }
            },
        }
    }

    fn ic_heuristic(&self, base: &SpaceSpec, renorm: &RenormSpec, v: &SparseVec) -> Result<f64> {
        let budget = self.config.ic_budget;
        let l1 = SpaceSpec::l1();
        let r = match renorm {
            RenormSpec::JamesIc { blocks, support_budget } => {
                let problem = InfConv { first: IcTerm::Coefficients(&l1), map: blocks, second: base, second_scale: 1.0 };
                infimal_convolution(self, &problem, v, *support_budget, &budget)?
            }
            RenormSpec::IcExtension { subspace_basis, inner, b, support_budget } => {
                let n = support_budget.unwrap_or(subspace_basis.len()).min(subspace_basis.len());
                let problem = InfConv { first: IcTerm::Mapped(inner), map: subspace_basis, second: base, second_scale: *b };
                infimal_convolution(self, &problem, v, n, &budget)?
            }
            _ => unreachable!("only infimal-convolution renormings reach the heuristic path"),
        };
        Ok(r.value)
    }
}

fn weight(weights: &[f64], c: usize) -> f64 {
    weights.get(c - 1).copied().unwrap_or(1.0)
}

fn apply_weights<S: Scalar>(weights: &[f64], v: &SparseVec<S>) -> SparseVec<S> {
    let mut out = SparseVec::zero();
    for (i, x) in v.iter() {
        out.set(i, x.clone() * S::from_f64(weight(weights, i)));
    }
    out
}

/// Affine upper bound of `|z|`: the constant itself or a fresh variable.
fn abs_bound<S: Scalar>(lp: &mut LinearProgram<S>, z: &Affine<S>) -> Affine<S> {
    if z.is_constant() {
        return Affine::constant(z.constant.abs());
    }
    let t = lp.add_var(false);
    let tv = Affine::var(t);
    z.clone().add_scaled(&-S::one(), &tv).le(lp, S::zero());
    z.scale(&-S::one()).add_scaled(&-S::one(), &tv).le(lp, S::zero());
    tv
}

fn sup_bound<'a, S: Scalar>(lp: &mut LinearProgram<S>, zs: impl Iterator<Item = &'a Affine<S>>) -> Affine<S> {
    let zs: Vec<&Affine<S>> = zs.collect();
    if zs.iter().all(|z| z.is_constant()) {
        return Affine::constant(zs.iter().fold(S::zero(), |a, z| S::max_of(a, z.constant.abs())));
    }
    let t = lp.add_var(false);
    let tv = Affine::var(t);
    for z in zs {
        (*z).clone().add_scaled(&-S::one(), &tv).le(lp, S::zero());
        z.scale(&-S::one()).add_scaled(&-S::one(), &tv).le(lp, S::zero());
    }
    tv
}

fn max_abs<S: Scalar>(v: &SparseVec<S>) -> S {
    v.iter().fold(S::zero(), |a, (_, x)| S::max_of(a, x.abs()))
}

fn l1_dual<S: Scalar>(f: &SparseVec<S>) -> (S, SparseVec<S>) {
    let mut arg = SparseVec::zero();
    let mut total = S::zero();
    for (i, x) in f.iter() {
        total = total + x.abs();
        arg.set(i, if x.is_negative() { -S::one() } else { S::one() });
    }
    (total, arg)
}

pub(crate) fn pair_generic<S: Scalar>(f: &Functional, v: &SparseVec<S>) -> S {
    f.0.iter().fold(S::zero(), |acc, (i, c)| {
        let x = v.get(i);
        if x.is_zero() {
            acc
        } else {
            acc + S::from_f64(*c) * x
        }
    })
}

/// Sum of the two largest values (the second is zero when only one exists).
pub(crate) fn top_two_sum<S: Scalar>(vals: impl Iterator<Item = S>) -> S {
    let (mut a, mut b) = (S::zero(), S::zero());
    for x in vals {
        if x > a {
            b = a;
            a = x;
        } else if x > b {
            b = x;
        }
    }
    a + b
}

/// Closed-form `ℓp` norm, scaled by the largest entry for stability.
pub(crate) fn lp_norm_f64(v: &SparseVec, p: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |a, (_, x)| a.max(x.abs()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    if p == 1.0 {
        return v.iter().map(|(_, x)| x.abs()).sum();
    }
    let s: f64 = if p == 2.0 {
        v.iter().map(|(_, x)| (x / m) * (x / m)).sum()
    } else {
        v.iter().map(|(_, x)| (x.abs() / m).powf(p)).sum()
    };
    if p == 2.0 {
        m * s.sqrt()
    } else {
        m * s.powf(1.0 / p)
    }
}

impl Evaluator {
    /// Exact infimal convolution when both terms are polyhedral. Returns the
    /// value and the optimal coefficients of the first `active` columns.
    pub(crate) fn infconv_lp<S: Scalar>(
        &self,
        problem: &InfConv<'_>,
        y: &SparseVec<S>,
        active: usize,
    ) -> Result<Option<(S, Vec<S>)>> {
        let first_space = match problem.first {
            IcTerm::Coefficients(s) | IcTerm::Mapped(s) => s,
        };
        if !self.is_polyhedral(first_space) || !self.is_polyhedral(problem.second) {
            return Ok(None);
        }
        let mut lp = LinearProgram::<S>::new();
        let vars: Vec<usize> = (0..active).map(|_| lp.add_var(true)).collect();
        let mut image = AffineMap::new();
        let mut residual: AffineMap<S> = y.iter().map(|(i, x)| (i, Affine::constant(x.clone()))).collect();
        for (col, &c) in problem.map.iter().zip(&vars) {
            for (i, ui) in col.iter() {
                let ui = S::from_f64(*ui);
                let e = image.remove(&i).unwrap_or_else(|| Affine::constant(S::zero()));
                image.insert(i, e.add_scaled(&ui, &Affine::var(c)));
                let r = residual.remove(&i).unwrap_or_else(|| Affine::constant(S::zero()));
                residual.insert(i, r.add_scaled(&-ui, &Affine::var(c)));
            }
        }
        let first_arg = match problem.first {
            IcTerm::Coefficients(_) => vars.iter().enumerate().map(|(j, &c)| (j + 1, Affine::var(c))).collect(),
            IcTerm::Mapped(_) => image,
        };
        let Some(e1) = self.epigraph(&mut lp, first_space, &first_arg)? else {
            return Ok(None);
        };
        let Some(e2) = self.epigraph(&mut lp, problem.second, &residual)? else {
            return Ok(None);
        };
        let total = e1.add_scaled(&S::from_f64(problem.second_scale), &e2);
        for (var, c) in &total.terms {
            lp.objective[*var] = lp.objective[*var].clone() - c.clone();
        }
        let sol = lp.solve()?;
        let coeffs = vars.iter().map(|&v| sol.x[v].clone()).collect();
        Ok(Some((total.constant - sol.value, coeffs)))
    }
}

impl Evaluator {
    /// `max{ Σ objective_i a_i : ‖Σ a_i y_i‖ ≤ 1 }` for a polyhedral space,
    /// i.e. the dual norm of a functional on `span(vectors)`.
    pub(crate) fn span_dual_norm(&self, space: &SpaceSpec, vectors: &[SparseVec], objective: &[f64]) -> Result<f64> {
        let mut lp = LinearProgram::<f64>::new();
        let vars: Vec<usize> = vectors.iter().map(|_| lp.add_var(true)).collect();
        let mut z = AffineMap::new();
        for (y, &a) in vectors.iter().zip(&vars) {
            lp.objective[a] = objective[a];
            for (c, yc) in y.iter() {
                let e = z.remove(&c).unwrap_or_else(|| Affine::constant(0.0));
                z.insert(c, e.add_scaled(yc, &Affine::var(a)));
            }
        }
        let e = self
            .epigraph(&mut lp, space, &z)?
            .ok_or_else(|| Error::Unsupported(format!("epigraph of {space}")))?;
        e.le(&mut lp, 1.0);
        Ok(lp.solve()?.value)
    }
}
