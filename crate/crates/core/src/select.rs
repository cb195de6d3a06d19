//! Mazur extension steps, δ-schedules and the nested selection producing an
//! asymptotically monotone basic subsequence.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::{profile, BasisProfile, FiniteBasicSequence};
use crate::error::{Error, Result};
use crate::linalg::check_independent;
use crate::optkit::{minimize_1d_convex, sphere_optimize, Direction, OptBudget};
use crate::par;
use crate::vecspace::{Evaluator, Functional, SpaceSpec, SparseVec};

/// `δᵢ = (1+ε)^{2^{−i−1}} − 1` for `i = 1..=length`, so `∏(1+δᵢ) < √(1+ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSchedule {
    pub epsilon_target: f64,
    pub deltas: Vec<f64>,
}

impl DeltaSchedule {
    /// `∏(1+δᵢ)` over the materialized prefix.
    pub fn product(&self) -> f64 {
        self.deltas.iter().map(|d| 1.0 + d).product()
    }
}

fn delta_at(epsilon: f64, i: usize) -> f64 {
    (epsilon.ln_1p() * 0.5f64.powi(i as i32 + 1)).exp_m1()
}

/// The first `length` terms of the schedule for `epsilon`. `ε = 0` yields
/// zeros.
pub fn delta_schedule(epsilon: f64, length: usize) -> Result<DeltaSchedule> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::Parameter(format!("epsilon = {epsilon} must be a finite number ≥ 0")));
    }
    Ok(DeltaSchedule { epsilon_target: epsilon, deltas: (1..=length).map(|i| delta_at(epsilon, i)).collect() })
}

/// Built-in sequence generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum SequenceSource {
    /// `xₙ = eₙ` in `ℓ2`.
    OrthonormalL2,
    /// `xₙ = eₙ + (1/n)e₁` in `ℓ2`.
    PerturbedL2,
    /// `xₙ = eₙ` in `ℓp`.
    LpBasis { p: f64 },
    /// `xₙ = (e_{2n−1} + e_{2n})/2` in `ℓ1`.
    BlockL1,
    /// A finite explicit list.
    List { space: SpaceSpec, vectors: Vec<SparseVec>, bounds: (f64, f64) },
}

impl SequenceSource {
    /// Parses `orthonormal-l2`, `perturbed-l2`, `lp-basis[:p]` or `block-l1`.
    pub fn named(name: &str) -> Result<Self> {
        let s = match name {
            "orthonormal-l2" => SequenceSource::OrthonormalL2,
            "perturbed-l2" => SequenceSource::PerturbedL2,
            "lp-basis" => SequenceSource::LpBasis { p: 2.0 },
            "block-l1" => SequenceSource::BlockL1,
            _ => match name.strip_prefix("lp-basis:").map(str::parse::<f64>) {
                Some(Ok(p)) if p >= 1.0 => SequenceSource::LpBasis { p },
                _ => return Err(Error::Schema(format!("unknown sequence source {name:?}"))),
            },
        };
        Ok(s)
    }

    pub fn space(&self) -> SpaceSpec {
        match self {
            SequenceSource::OrthonormalL2 | SequenceSource::PerturbedL2 => SpaceSpec::l2(),
            SequenceSource::LpBasis { p } => SpaceSpec::lp(*p),
            SequenceSource::BlockL1 => SpaceSpec::l1(),
            SequenceSource::List { space, .. } => space.clone(),
        }
    }

    /// Declared `(A, B)` with `A ≤ ‖xₙ‖ ≤ B`.
    pub fn declared_bounds(&self) -> (f64, f64) {
        match self {
            SequenceSource::PerturbedL2 => (1.0, 2.0),
            SequenceSource::List { bounds, .. } => *bounds,
            _ => (1.0, 1.0),
        }
    }

    /// Weak nullness is a caller contract; the built-in generators satisfy it.
    pub fn weak_null_declared(&self) -> bool {
        true
    }

    /// `xₙ` for `n ≥ 1`, or `None` past the end of a finite list.
    pub fn vector(&self, n: usize) -> Option<SparseVec> {
        if n == 0 {
            return None;
        }
        match self {
            SequenceSource::OrthonormalL2 | SequenceSource::LpBasis { .. } => Some(SparseVec::unit(n)),
            SequenceSource::PerturbedL2 => {
                let mut v = SparseVec::unit(n);
                v.set(1, v.get(1) + 1.0 / n as f64);
                Some(v)
            }
            SequenceSource::BlockL1 => Some(SparseVec::from_pairs([(2 * n - 1, 0.5), (2 * n, 0.5)]).expect("valid indices")),
            SequenceSource::List { vectors, .. } => vectors.get(n - 1).cloned(),
        }
    }
}

/// Tunables of the selection pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectConfig {
    pub budget: OptBudget,
    /// Fraction of `δ` withheld when the margin comes from a heuristic.
    pub guard: f64,
    /// Candidates examined per Mazur step before giving up.
    pub max_scan: usize,
    /// Largest number of entries materialized in one row.
    pub max_row_len: usize,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self { budget: OptBudget::default(), guard: 0.1, max_scan: 500, max_row_len: 64 }
    }
}

impl SelectConfig {
    fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        if !(0.0..1.0).contains(&self.guard) {
            return Err(Error::Parameter(format!("guard = {} must lie in [0, 1)", self.guard)));
        }
        if self.max_scan == 0 || self.max_row_len < 2 {
            return Err(Error::Parameter("max_scan must be positive and max_row_len ≥ 2".into()));
        }
        Ok(())
    }
}

/// `μ = min{ ‖e + t·x‖ : e ∈ span(E), ‖e‖ = 1, t ∈ ℝ }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    /// Exact value; otherwise an upper estimate from a heuristic search.
    pub certified: bool,
}

impl Margin {
    /// Whether the margin passes the Mazur test for `δ`.
    pub fn accepts(&self, delta: f64, guard: f64) -> bool {
        let d = if self.certified { delta } else { delta * (1.0 - guard) };
        self.value >= 1.0 / (1.0 + d)
    }
}

/// Computes the Mazur margin of `x` against `span(e_basis)`.
pub fn mazur_margin(
    ev: &Evaluator,
    space: &SpaceSpec,
    e_basis: &[SparseVec],
    x: &SparseVec,
    budget: &OptBudget,
) -> Result<Margin> {
    if e_basis.is_empty() {
        return Err(Error::Precondition("the Mazur step needs a nonempty E".into()));
    }
    if x.is_zero() {
        return Ok(Margin { value: 1.0, certified: true });
    }
    if let Some(w) = space.euclidean_weights() {
        return euclidean_margin(e_basis, x, &w);
    }
    if space.is_lattice() && e_basis.iter().all(|e| e.support().all(|i| x.get(i) == 0.0)) {
        return Ok(Margin { value: 1.0, certified: true });
    }
    let xn = ev.norm(space, x)?;
    let reach = 2.0 / xn;
    let tol = budget.tol;
    let r = sphere_optimize(
        |v| ev.norm(space, v),
        e_basis,
        |_, e| {
            let line = minimize_1d_convex(
                |t| ev.norm(space, &e.axpy(&t, x)).unwrap_or(f64::NAN),
                (-reach, reach),
                tol,
            )?;
            Ok(line.value)
        },
        Direction::Min,
        budget,
    )?;
    Ok(Margin { value: r.value.min(1.0), certified: false })
}

fn euclidean_margin(e_basis: &[SparseVec], x: &SparseVec, w: &[f64]) -> Result<Margin> {
    check_independent(e_basis)?;
    let weight = |c: usize| w.get(c - 1).copied().unwrap_or(1.0);
    let inner = |a: &SparseVec, b: &SparseVec| -> f64 { a.iter().map(|(c, v)| v * b.get(c) * weight(c).powi(2)).sum() };
    let k = e_basis.len();
    let xn = inner(x, x).sqrt();
    let g = DMatrix::from_fn(k, k, |i, j| inner(&e_basis[i], &e_basis[j]));
    let b = DVector::from_fn(k, |i, _| inner(&e_basis[i], x) / xn);
    let chol = g.cholesky().ok_or_else(|| Error::Rank("E is linearly dependent".into()))?;
    let c = chol.solve(&b);
    let proj = b.dot(&c).clamp(0.0, 1.0);
    Ok(Margin { value: (1.0 - proj).sqrt(), certified: true })
}

/// Result of one Mazur step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MazurStep {
    pub index: usize,
    pub margin: Margin,
}

/// Smallest accepted position among `candidates`, or the best margin seen.
fn first_accepted(
    ev: &Evaluator,
    space: &SpaceSpec,
    e_basis: &[SparseVec],
    candidates: &[SparseVec],
    delta: f64,
    cfg: &SelectConfig,
) -> Result<std::result::Result<(usize, Margin), f64>> {
    let margins = par::try_map_range(candidates.len(), |k| mazur_margin(ev, space, e_basis, &candidates[k], &cfg.budget))?;
    match margins.iter().position(|m| m.accepts(delta, cfg.guard)) {
        Some(k) => Ok(Ok((k, margins[k]))),
        None => Ok(Err(margins.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max))),
    }
}

/// Scans `x_N` for `N = start_index, start_index+1, …` and returns the
/// smallest `N` whose margin against `span(e_basis)` passes the test for
/// `delta`.
pub fn mazur_step(
    space: &SpaceSpec,
    e_basis: &[SparseVec],
    source: &SequenceSource,
    start_index: usize,
    delta: f64,
    cfg: &SelectConfig,
) -> Result<MazurStep> {
    cfg.validate()?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Parameter(format!("delta = {delta} must be finite and ≥ 0")));
    }
    check_independent(e_basis)?;
    let ev = Evaluator::default();
    let chunk = (2 * par::current_threads()).max(4);
    let mut scanned = 0;
    let mut best = f64::NEG_INFINITY;
    let mut n = start_index.max(1);
    while scanned < cfg.max_scan {
        let take = chunk.min(cfg.max_scan - scanned);
        let candidates: Vec<SparseVec> = (n..n + take).map_while(|i| source.vector(i)).collect();
        if candidates.is_empty() {
            break;
        }
        match first_accepted(&ev, space, e_basis, &candidates, delta, cfg)? {
            Ok((k, margin)) => return Ok(MazurStep { index: n + k, margin }),
            Err(b) => best = best.max(b),
        }
        scanned += candidates.len();
        n += candidates.len();
    }
    Err(Error::NotFound { scanned, best_margin: best })
}

/// One selected subsequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub indices: Vec<usize>,
    /// Margin of each Mazur step (the first entry is taken without a step).
    pub margins: Vec<f64>,
    pub certified: bool,
}

/// Picks `x₁` and then repeatedly extends by Mazur steps with the schedule
/// for `epsilon`, so the selected row has basis constant at most `√(1+ε)`.
pub fn pelczynski_select(source: &SequenceSource, epsilon: f64, length: usize, cfg: &SelectConfig) -> Result<SelectionRow> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if length < 2 {
        return Err(Error::Precondition("length must be at least 2".into()));
    }
    cfg.validate()?;
    let space = source.space();
    let first = source.vector(1).ok_or_else(|| Error::Precondition("source is empty".into()))?;
    check_bounds(&space, source, 1, &first)?;
    let mut row = SelectionRow { indices: vec![1], margins: vec![1.0], certified: true };
    let mut vectors = vec![first];
    for i in 1..length {
        let delta = delta_at(epsilon, i);
        let step = mazur_step(&space, &vectors, source, row.indices[i - 1] + 1, delta, cfg)?;
        let v = source.vector(step.index).expect("accepted index exists");
        check_bounds(&space, source, step.index, &v)?;
        row.indices.push(step.index);
        row.margins.push(step.margin.value);
        row.certified &= step.margin.certified;
        vectors.push(v);
    }
    Ok(row)
}

fn check_bounds(space: &SpaceSpec, source: &SequenceSource, n: usize, v: &SparseVec) -> Result<()> {
    let (a, b) = source.declared_bounds();
    let norm = Evaluator::default().norm(space, v)?;
    if norm < a * (1.0 - 1e-12) || norm > b * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("x_{n} has norm {norm} outside the declared bounds [{a}, {b}]")));
    }
    Ok(())
}

/// The nested rows, their diagonal and per-step diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    /// Materialized source indices of each row.
    pub rows: Vec<Vec<usize>>,
    /// `n^k_k` for `k = 1..=stages`.
    pub diagonal: Vec<usize>,
    /// Mazur margins of each row; entries inherited from the diagonal prefix
    /// carry the margins recorded when they were first selected.
    pub margins: Vec<Vec<f64>>,
    pub epsilons: Vec<f64>,
    pub guard: f64,
    pub certified: bool,
    /// `max_f |f(x)|` over the supplied functional family for each diagonal
    /// vector (a diagnostic for weak nullness).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_null_witness: Option<Vec<f64>>,
}

struct Row {
    epsilon: f64,
    prefix: usize,
    entries: Vec<usize>,
    vectors: Vec<SparseVec>,
    margins: Vec<f64>,
    /// Next candidate: a source index for the first row, a position in the
    /// parent row otherwise.
    cursor: usize,
}

struct Selector<'a> {
    source: &'a SequenceSource,
    space: SpaceSpec,
    cfg: &'a SelectConfig,
    ev: Evaluator,
    rows: Vec<Row>,
    certified: bool,
}

impl Selector<'_> {
    /// Appends one entry to row `r` (0-based).
    fn extend(&mut self, r: usize) -> Result<()> {
        let len = self.rows[r].entries.len();
        if len >= self.cfg.max_row_len {
            return Err(Error::ResourceLimit { what: format!("row {} length", r + 1), cap: self.cfg.max_row_len });
        }
        if r == 0 && len == 0 {
            let n = self.rows[0].cursor;
            let v = self.source.vector(n).ok_or_else(|| Error::Precondition("source is empty".into()))?;
            check_bounds(&self.space, self.source, n, &v)?;
            let row = &mut self.rows[0];
            row.entries.push(n);
            row.vectors.push(v);
            row.margins.push(1.0);
            row.cursor = n + 1;
            return Ok(());
        }
        let delta = delta_at(self.rows[r].epsilon, len - self.rows[r].prefix);
        let chunk = (2 * par::current_threads()).max(4);
        let mut scanned = 0;
        let mut best = f64::NEG_INFINITY;
        while scanned < self.cfg.max_scan {
            let cursor = self.rows[r].cursor;
            let (indices, candidates): (Vec<usize>, Vec<SparseVec>) = if r == 0 {
                let take = chunk.min(self.cfg.max_scan - scanned);
                (cursor..cursor + take).map_while(|n| self.source.vector(n).map(|v| (n, v))).unzip()
            } else {
                if self.rows[r - 1].entries.len() <= cursor {
                    self.extend(r - 1)?;
                }
                let parent = &self.rows[r - 1];
                let end = parent.entries.len().min(cursor + self.cfg.max_scan - scanned);
                (parent.entries[cursor..end].to_vec(), parent.vectors[cursor..end].to_vec())
            };
            if candidates.is_empty() {
                break;
            }
            let found = first_accepted(&self.ev, &self.space, &self.rows[r].vectors, &candidates, delta, self.cfg)?;
            match found {
                Ok((k, margin)) => {
                    check_bounds(&self.space, self.source, indices[k], &candidates[k])?;
                    self.certified &= margin.certified;
                    let row = &mut self.rows[r];
                    row.entries.push(indices[k]);
                    row.vectors.push(candidates[k].clone());
                    row.margins.push(margin.value);
                    row.cursor = if r == 0 { indices[k] + 1 } else { cursor + k + 1 };
                    return Ok(());
                }
                Err(b) => {
                    best = best.max(b);
                    scanned += candidates.len();
                    self.rows[r].cursor = if r == 0 { indices[indices.len() - 1] + 1 } else { cursor + candidates.len() };
                }
            }
        }
        Err(Error::NotFound { scanned, best_margin: best })
    }
}

/// Builds rows `1..=stages`: row `j+1` fixes the diagonal prefix
/// `x_{n¹₁}, …, x_{nʲⱼ}` and extends it by Mazur steps for `ε_{j+1}` over the
/// later entries of row `j`. Rows are materialized only as far as the
/// diagonal requires.
pub fn asymptotic_monotone_select(
    source: &SequenceSource,
    epsilons: &[f64],
    stages: usize,
    cfg: &SelectConfig,
    witness_family: Option<&[Functional]>,
) -> Result<SelectionTrace> {
    cfg.validate()?;
    if stages == 0 {
        return Err(Error::Precondition("stages must be at least 1".into()));
    }
    if epsilons.len() < stages {
        return Err(Error::Precondition(format!("{} epsilons given for {stages} stages", epsilons.len())));
    }
    let eps = &epsilons[..stages];
    if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("epsilons must be positive and strictly decreasing".into()));
    }
    let mut sel = Selector {
        source,
        space: source.space(),
        cfg,
        ev: Evaluator::default(),
        rows: Vec::with_capacity(stages),
        certified: true,
    };
    sel.rows.push(Row { epsilon: eps[0], prefix: 0, entries: Vec::new(), vectors: Vec::new(), margins: Vec::new(), cursor: 1 });
    for k in 0..stages {
        if k > 0 {
            let parent = &sel.rows[k - 1];
            sel.rows.push(Row {
                epsilon: eps[k],
                prefix: k,
                entries: parent.entries[..k].to_vec(),
                vectors: parent.vectors[..k].to_vec(),
                margins: parent.margins[..k].to_vec(),
                cursor: k,
            });
        }
        while sel.rows[k].entries.len() <= k {
            sel.extend(k)?;
        }
    }
    let diagonal: Vec<usize> = (0..stages).map(|k| sel.rows[k].entries[k]).collect();
    let weak_null_witness = witness_family.map(|fam| {
        (0..stages)
            .map(|k| fam.iter().map(|f| f.apply(&sel.rows[k].vectors[k]).abs()).fold(0.0, f64::max))
            .collect()
    });
    Ok(SelectionTrace {
        rows: sel.rows.iter().map(|r| r.entries.clone()).collect(),
        margins: sel.rows.iter().map(|r| r.margins.clone()).collect(),
        diagonal,
        epsilons: eps.to_vec(),
        guard: cfg.guard,
        certified: sel.certified,
        weak_null_witness,
    })
}

/// Profile of the diagonal subsequence (`None` for a single stage).
pub fn diagonal_profile(source: &SequenceSource, trace: &SelectionTrace, budget: &OptBudget) -> Result<Option<BasisProfile>> {
    if trace.diagonal.len() < 2 {
        return Ok(None);
    }
    let vectors = trace
        .diagonal
        .iter()
        .map(|&n| source.vector(n).ok_or_else(|| Error::Precondition(format!("source has no x_{n}"))))
        .collect::<Result<Vec<_>>>()?;
    let seq = FiniteBasicSequence::new(source.space(), vectors)?;
    profile(&seq, budget).map(Some)
}

/// `ε_k = r^k` for `k = 1..=n`.
pub fn geometric_epsilons(r: f64, n: usize) -> Result<Vec<f64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parameter(format!("ratio {r} must lie in (0, 1)")));
    }
    Ok((1..=n).map(|k| r.powi(k as i32)).collect())
}
