//! Composable descriptions of norms on `c00`.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::renorm::RenormSpec;

/// Exponent `p ∈ [1, ∞]`; serialized as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INFINITY
        } else if self.is_infinite() {
            Exponent(1.0)
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(p) => Ok(Exponent(p)),
            Repr::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(Exponent::INFINITY),
            Repr::Text(t) => Err(D::Error::custom(format!("invalid exponent {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TsirelsonVariant {
    /// Figiel–Johnson space `T`, defined by its implicit norm equation.
    T,
    /// The dual `T*` (the original Tsirelson space).
    Tstar,
}

/// A norm on finitely supported sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
pub enum SpaceSpec {
    Lp { p: Exponent },
    C0,
    Tsirelson { variant: TsirelsonVariant },
    Renormed { base: Box<SpaceSpec>, renorm: Box<RenormSpec> },
}

impl SpaceSpec {
    pub fn lp(p: f64) -> Self {
        SpaceSpec::Lp { p: Exponent(p) }
    }

    pub fn l1() -> Self {
        Self::lp(1.0)
    }

    pub fn l2() -> Self {
        Self::lp(2.0)
    }

    pub fn linf() -> Self {
        SpaceSpec::Lp { p: Exponent::INFINITY }
    }

    pub fn tsirelson() -> Self {
        SpaceSpec::Tsirelson { variant: TsirelsonVariant::T }
    }

    pub fn tsirelson_dual() -> Self {
        SpaceSpec::Tsirelson { variant: TsirelsonVariant::Tstar }
    }

    pub fn renormed(base: SpaceSpec, renorm: RenormSpec) -> Self {
        SpaceSpec::Renormed { base: Box::new(base), renorm: Box::new(renorm) }
    }

    /// Parses either a JSON description or one of the shorthands
    /// `l1`, `l2`, `linf`, `lp:<p>`, `c0`, `tsirelson-T`, `tsirelson-Tstar`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            let s: SpaceSpec = serde_json::from_str(t)?;
            s.validate()?;
            return Ok(s);
        }
        let s = match t {
            "l1" => Self::l1(),
            "l2" => Self::l2(),
            "linf" => Self::linf(),
            "c0" => SpaceSpec::C0,
            "tsirelson-T" | "T" => Self::tsirelson(),
            "tsirelson-Tstar" | "Tstar" => Self::tsirelson_dual(),
            _ => match t.strip_prefix("lp:") {
                Some(p) => {
                    let p: f64 = p
                        .parse()
                        .map_err(|_| Error::Schema(format!("invalid exponent in {t:?}")))?;
                    Self::lp(p)
                }
                None => return Err(Error::Schema(format!("unknown space {t:?}"))),
            },
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks the structural invariants of the description (not premises
    /// that need norm evaluations).
    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Lp { p } => {
                if p.0.is_nan() || p.0 < 1.0 {
                    return Err(Error::InvalidSpace(format!("p = {} is below 1", p.0)));
                }
                Ok(())
            }
            SpaceSpec::C0 | SpaceSpec::Tsirelson { .. } => Ok(()),
            SpaceSpec::Renormed { base, renorm } => {
                base.validate()?;
                renorm.validate()
            }
        }
    }

    /// True when the unit vectors form a 1-unconditional basis, so coordinate
    /// projections have norm at most one.
    pub fn is_lattice(&self) -> bool {
        match self {
            SpaceSpec::Lp { .. } | SpaceSpec::C0 | SpaceSpec::Tsirelson { .. } => true,
            SpaceSpec::Renormed { base, renorm } => {
                matches!(**renorm, RenormSpec::Diagonal { .. }) && base.is_lattice()
            }
        }
    }

    /// Inner-product weights `w` when the norm is `(Σ wᵢ² xᵢ²)^{1/2}`.
    pub fn euclidean_weights(&self) -> Option<Vec<f64>> {
        match self {
            SpaceSpec::Lp { p } if p.0 == 2.0 => Some(Vec::new()),
            SpaceSpec::Renormed { base, renorm } => match &**renorm {
                RenormSpec::Diagonal { weights } => {
                    let inner = base.euclidean_weights()?;
                    let n = weights.len().max(inner.len());
                    Some(
                        (0..n)
                            .map(|i| {
                                weights.get(i).copied().unwrap_or(1.0) * inner.get(i).copied().unwrap_or(1.0)
                            })
                            .collect(),
                    )
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// Coordinates on which the renorming layers carry structure
    /// (functional supports, block supports, weights).
    pub fn touched_coords(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        if let SpaceSpec::Renormed { base, renorm } = self {
            out.extend(base.touched_coords());
            out.extend(renorm.touched_coords());
        }
        out
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp { p } if p.is_infinite() => write!(f, "l_inf"),
            SpaceSpec::Lp { p } => write!(f, "l_{}", p.0),
            SpaceSpec::C0 => write!(f, "c0"),
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::T } => write!(f, "T"),
            SpaceSpec::Tsirelson { variant: TsirelsonVariant::Tstar } => write!(f, "T*"),
            SpaceSpec::Renormed { base, renorm } => write!(f, "{}[{}]", base, renorm.kind_name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let s: SpaceSpec = serde_json::from_str(r#"{"space":"lp","p":1.5}"#).unwrap();
        assert_eq!(s, SpaceSpec::lp(1.5));
        let s: SpaceSpec = serde_json::from_str(r#"{"space":"lp","p":"inf"}"#).unwrap();
        assert_eq!(s, SpaceSpec::linf());
        let s: SpaceSpec = serde_json::from_str(r#"{"space":"tsirelson","variant":"Tstar"}"#).unwrap();
        assert_eq!(s, SpaceSpec::tsirelson_dual());
        assert_eq!(serde_json::to_string(&SpaceSpec::C0).unwrap(), r#"{"space":"c0"}"#);
        let r = SpaceSpec::renormed(SpaceSpec::l1(), RenormSpec::Diagonal { weights: vec![2.0] });
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn invalid_exponent() {
        assert!(matches!(SpaceSpec::parse(r#"{"space":"lp","p":0.5}"#), Err(Error::InvalidSpace(_))));
        assert!(SpaceSpec::parse("lp:0.9").is_err());
        assert_eq!(SpaceSpec::parse("tsirelson-Tstar").unwrap(), SpaceSpec::tsirelson_dual());
        assert_eq!(SpaceSpec::parse("lp:3").unwrap(), SpaceSpec::lp(3.0));
    }

    #[test]
    fn conjugates() {
        assert!(Exponent(1.0).conjugate().is_infinite());
        assert_eq!(Exponent(2.0).conjugate(), Exponent(2.0));
        assert_eq!(Exponent::INFINITY.conjugate(), Exponent(1.0));
    }
}
