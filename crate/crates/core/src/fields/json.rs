//! JSON exchange format for polynomials and alternating tensors.
//!
//! ```json
//! {"chart": 2, "degree": 2, "kind": "vector",
//!  "components": [{"idx": [1, 2], "poly": [{"exp": [1, 0], "num": 1, "den": 1}]}]}
//! ```
//!
//! Indices are 1-based on the wire. Integers that do not fit in 64 bits are
//! written as decimal strings and accepted either way.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::alternating::{Alternating, Kind};
use super::map::PolyMap;
use super::poly::{PolyScalar, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    pub fn from_bigint(b: &BigInt) -> Self {
        match b.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(b.to_string()),
        }
    }

    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => {
                BigInt::from_str(s.trim()).map_err(|_| Error::Invalid(format!("not an integer: {s:?}")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub num: JsonInt,
    #[serde(default = "one")]
    pub den: JsonInt,
}

fn one() -> JsonInt {
    JsonInt::Small(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub idx: Vec<usize>,
    pub poly: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub chart: usize,
    pub degree: usize,
    pub kind: String,
    pub components: Vec<ComponentJson>,
}

/// A rational given as an integer, a `"p/q"` string, or `{"num", "den"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Int(i64),
    Text(String),
    Frac { num: JsonInt, den: JsonInt },
}

impl RationalJson {
    pub fn from_rational(r: &Rational) -> Self {
        if r.is_integer() {
            if let Some(v) = r.numer().to_i64() {
                return RationalJson::Int(v);
            }
        }
        RationalJson::Text(r.to_string())
    }

    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            RationalJson::Int(v) => Ok(Rational::from_integer(BigInt::from(*v))),
            RationalJson::Text(s) => parse_rational(s),
            RationalJson::Frac { num, den } => make_rational(num.to_bigint()?, den.to_bigint()?),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => make_rational(
            BigInt::from_str(n.trim()).map_err(|_| bad())?,
            BigInt::from_str(d.trim()).map_err(|_| bad())?,
        ),
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

fn make_rational(n: BigInt, d: BigInt) -> Result<Rational> {
    if d.is_zero() {
        return Err(Error::Invalid("zero denominator".into()));
    }
    Ok(Rational::new(n, d))
}

pub fn poly_to_json(p: &PolyScalar) -> Vec<TermJson> {
    p.terms()
        .map(|(m, c)| TermJson {
            exp: m.exps().to_vec(),
            num: JsonInt::from_bigint(c.numer()),
            den: JsonInt::from_bigint(c.denom()),
        })
        .collect()
}

pub fn poly_from_json(nvars: usize, terms: &[TermJson]) -> Result<PolyScalar> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.exp.len() != nvars {
            return Err(Error::ChartMismatch {
                expected: nvars,
                found: t.exp.len(),
            });
        }
        out.push((t.exp.clone(), make_rational(t.num.to_bigint()?, t.den.to_bigint()?)?));
    }
    Ok(PolyScalar::from_terms(nvars, out))
}

impl<K: Kind> Alternating<K> {
    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            chart: self.dim(),
            degree: self.degree(),
            kind: K::NAME.to_string(),
            components: self
                .components()
                .map(|(idx, p)| ComponentJson {
                    idx: idx.iter().map(|i| i + 1).collect(),
                    poly: poly_to_json(p),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &TensorJson) -> Result<Self> {
        if j.kind != K::NAME {
            return Err(Error::Invalid(format!("expected kind {:?}, found {:?}", K::NAME, j.kind)));
        }
        if j.chart == 0 {
            return Err(Error::Invalid("chart dimension must be positive".into()));
        }
        let mut comps = Vec::with_capacity(j.components.len());
        for c in &j.components {
            if c.idx.contains(&0) {
                return Err(Error::Invalid(format!("indices are 1-based, found {:?}", c.idx)));
            }
            let idx = c.idx.iter().map(|i| i - 1).collect();
            comps.push((idx, poly_from_json(j.chart, &c.poly)?));
        }
        Self::try_from_components(j.chart, j.degree, comps)
    }
}

/// `{"source": n, "components": [poly, ...]}`; the target dimension is the component count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub source: usize,
    pub components: Vec<Vec<TermJson>>,
}

impl PolyMap {
    pub fn to_json(&self) -> MapJson {
        MapJson {
            source: super::map::SmoothMap::source_dim(self),
            components: self.components().iter().map(poly_to_json).collect(),
        }
    }

    pub fn from_json(j: &MapJson) -> Result<Self> {
        let comps = j
            .components
            .iter()
            .map(|c| poly_from_json(j.source, c))
            .collect::<Result<Vec<_>>>()?;
        PolyMap::new(j.source, comps)
    }
}
