//! Finitely supported coordinate vectors.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A vector of `c00` stored as a map from 1-based coordinate index to a
/// nonzero coefficient.
///
/// Zero coefficients are never stored, so two vectors are equal exactly when
/// their maps are equal.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVec<S = f64> {
    entries: BTreeMap<usize, S>,
}

impl<S: Scalar> SparseVec<S> {
    pub fn zero() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// The unit coordinate vector `e_i`.
    pub fn unit(i: usize) -> Self {
        assert!(i >= 1, "coordinate indices are 1-based");
        let mut entries = BTreeMap::new();
        entries.insert(i, S::one());
        Self { entries }
    }

    /// Builds a vector from `(index, value)` pairs. Repeated indices are summed.
    pub fn from_pairs<I: IntoIterator<Item = (usize, S)>>(pairs: I) -> Result<Self> {
        let mut v = Self::zero();
        for (i, x) in pairs {
            if i == 0 {
                return Err(Error::Precondition("coordinate indices are 1-based".into()));
            }
            let cur = v.get(i);
            v.set(i, cur + x);
        }
        Ok(v)
    }

    /// Builds `Σ dense[k]·e_{k+1}`.
    pub fn from_dense(dense: &[S]) -> Self {
        let mut v = Self::zero();
        for (k, x) in dense.iter().enumerate() {
            v.set(k + 1, x.clone());
        }
        v
    }

    pub fn get(&self, i: usize) -> S {
        self.entries.get(&i).cloned().unwrap_or_else(S::zero)
    }

    /// Sets coordinate `i`, dropping it when `x` is zero.
    pub fn set(&mut self, i: usize, x: S) {
        if x.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, x);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> + '_ {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index in the support, or 0 for the zero vector.
    pub fn max_index(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn min_index(&self) -> usize {
        self.entries.keys().next().copied().unwrap_or(0)
    }

    /// Dense coefficients for indices `1..=dim`.
    pub fn to_dense(&self, dim: usize) -> Vec<S> {
        (1..=dim).map(|i| self.get(i)).collect()
    }

    pub fn scale(&self, a: &S) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        Self {
            entries: self.entries.iter().map(|(i, x)| (*i, x.clone() * a.clone())).collect(),
        }
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: &S, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            let cur = out.get(i);
            out.set(i, cur + a.clone() * x.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(&S::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(&-S::one(), other)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// Coordinate pairing `Σ selfᵢ otherᵢ` over the common support.
    pub fn dot(&self, other: &Self) -> S {
        let (small, large) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        small
            .iter()
            .filter_map(|(i, x)| large.entries.get(&i).map(|y| x.clone() * y.clone()))
            .fold(S::zero(), |acc, t| acc + t)
    }

    /// Restriction to the coordinates accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, x)| (*i, x.clone()))
                .collect(),
        }
    }

    /// Coordinatewise `|vᵢ|`.
    pub fn abs(&self) -> Self {
        Self { entries: self.entries.iter().map(|(i, x)| (*i, x.abs())).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseVec<T> {
        let mut out = SparseVec::zero();
        for (i, x) in self.iter() {
            out.set(i, f(x));
        }
        out
    }
}

impl SparseVec<f64> {
    /// Exact rational copy (shortest-decimal conversion of each entry).
    pub fn to_rational(&self) -> SparseVec<Rational> {
        self.map(|x| Rational::from_f64(*x))
    }

    /// Euclidean length, used for step sizes and scaling heuristics.
    pub fn l2(&self) -> f64 {
        self.entries.values().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.entries.values().all(|x| x.is_finite())
    }
}

impl SparseVec<BigRational> {
    pub fn to_f64(&self) -> SparseVec<f64> {
        self.map(|x| Scalar::to_f64(x))
    }
}

#[derive(Serialize, Deserialize)]
struct CoordsRepr {
    coords: Vec<(usize, f64)>,
}

impl Serialize for SparseVec<f64> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        CoordsRepr { coords: self.iter().map(|(i, x)| (i, *x)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseVec<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CoordsRepr::deserialize(d)?;
        if let Some((i, x)) = repr.coords.iter().find(|(i, x)| *i == 0 || !x.is_finite()) {
            return Err(D::Error::custom(format!("invalid coordinate [{i}, {x}]: indices are 1-based and values finite")));
        }
        SparseVec::from_pairs(repr.coords).map_err(D::Error::custom)
    }
}

/// A continuous linear functional on `c00`, acting by coordinate pairing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Functional(pub SparseVec);

impl Functional {
    /// The coordinate functional `e_i*`.
    pub fn coordinate(i: usize) -> Self {
        Functional(SparseVec::unit(i))
    }

    pub fn apply(&self, v: &SparseVec) -> f64 {
        pair(self, v)
    }

    pub fn coefficients(&self) -> &SparseVec {
        &self.0
    }
}

/// `f(v) = Σ fᵢ vᵢ`.
pub fn pair(f: &Functional, v: &SparseVec) -> f64 {
    f.0.dot(v)
}
