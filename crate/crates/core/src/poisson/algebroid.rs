//! Lie algebroids over a chart and fiberwise-linear Poisson structures on the dual.
//!
//! On the chart `(x_1..x_m, y_1..y_n)` of `E*` the bracket is
//! `{y_i, y_j} = Σ_k c_{ij}^k y_k`, `{y_i, x_l} = a_i^l`, `{x_l, x_r} = 0`,
//! i.e. `π = ½Σ c_{ij}^k y_k ∂_{y_i}∧∂_{y_j} + Σ_i ∂_{y_i}∧a_i`.

use std::collections::BTreeMap;

use super::{ConstantJson, PoissonBivector, ValueJson};
use crate::error::{check_dim, Error, Result};
use crate::fields::json::{poly_from_json, poly_to_json, RationalJson, TensorJson};
use crate::fields::{PolyKVector, PolyScalar};

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebroidData {
    base_dim: usize,
    anchors: Vec<PolyKVector>,
    /// `c_{ij}^k` for `i < j`, zero entries dropped.
    c: BTreeMap<(usize, usize, usize), PolyScalar>,
}

impl LieAlgebroidData {
    /// `c` may list `(i, j)` in either order; `(j, i)` is stored as the negative.
    pub fn new<I>(base_dim: usize, anchors: Vec<PolyKVector>, c: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, PolyScalar)>,
    {
        let n = anchors.len();
        for a in &anchors {
            check_dim(base_dim, a.dim())?;
            if a.degree() != 1 {
                return Err(Error::Degree("anchors must be vector fields".into()));
            }
        }
        let mut map: BTreeMap<(usize, usize, usize), PolyScalar> = BTreeMap::new();
        for (i, j, k, v) in c {
            if i >= n || j >= n || k >= n {
                return Err(Error::Invalid(format!("structure function index out of range for rank {n}")));
            }
            check_dim(base_dim, v.nvars())?;
            if i == j {
                if !v.is_zero() {
                    return Err(Error::Invalid("c_{ii}^k must vanish".into()));
                }
                continue;
            }
            let (key, v) = if i < j { ((i, j, k), v) } else { ((j, i, k), -v) };
            let e = map.entry(key).or_insert_with(|| PolyScalar::zero(base_dim));
            *e += &v;
        }
        map.retain(|_, v| !v.is_zero());
        Ok(LieAlgebroidData {
            base_dim,
            anchors,
            c: map,
        })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.anchors.len()
    }

    pub fn anchor(&self, i: usize) -> &PolyKVector {
        &self.anchors[i]
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> PolyScalar {
        let m = self.base_dim;
        if i < j {
            self.c.get(&(i, j, k)).cloned().unwrap_or_else(|| PolyScalar::zero(m))
        } else if i > j {
            -self.c(j, i, k)
        } else {
            PolyScalar::zero(m)
        }
    }

    pub fn structure_functions(&self) -> impl Iterator<Item = (&(usize, usize, usize), &PolyScalar)> {
        self.c.iter()
    }

    /// Failures of the algebroid axioms on the frame `ε_i`:
    /// the anchor is a morphism of brackets, and the Jacobi identity holds.
    pub fn jacobi_defects(&self) -> Vec<String> {
        let n = self.rank();
        let m = self.base_dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                // a([ε_i, ε_j]) = [a_i, a_j]
                let mut lhs = PolyKVector::zero(m, 1);
                for k in 0..n {
                    lhs = lhs.add(&self.anchors[k].mul_scalar(&self.c(i, j, k)));
                }
                if lhs != self.anchors[i].bracket(&self.anchors[j]) {
                    out.push(format!("anchor does not intertwine brackets of ε{} and ε{}", i + 1, j + 1));
                }
            }
        }
        // [ε_i, [ε_j, ε_k]] = Σ_l c_{jk}^l [ε_i, ε_l] + a_i(c_{jk}^l) ε_l
        let inner = |i: usize, j: usize, k: usize, mm: usize| {
            let mut s = PolyScalar::zero(m);
            for l in 0..n {
                let cjk = self.c(j, k, l);
                if cjk.is_zero() {
                    continue;
                }
                s += &(&cjk * &self.c(i, l, mm));
                if l == mm {
                    s += &self.anchors[i].apply(&cjk);
                }
            }
            s
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for mm in 0..n {
                        let total = &(&inner(i, j, k, mm) + &inner(j, k, i, mm)) + &inner(k, i, j, mm);
                        if !total.is_zero() {
                            out.push(format!(
                                "Jacobi identity fails for (ε{}, ε{}, ε{}) in component {}",
                                i + 1,
                                j + 1,
                                k + 1,
                                mm + 1
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> AlgebroidJson {
        AlgebroidJson {
            base: self.base_dim,
            anchors: self.anchors.iter().map(|a| a.to_json()).collect(),
            c: self
                .c
                .iter()
                .map(|(&(i, j, k), v)| ConstantJson {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    poly_or_rational: match v.as_constant() {
                        Some(r) => ValueJson::Rational(RationalJson::from_rational(&r)),
                        None => ValueJson::Poly(poly_to_json(v)),
                    },
                })
                .collect(),
        }
    }

    pub fn from_json(j: &AlgebroidJson) -> Result<Self> {
        let anchors = j.anchors.iter().map(PolyKVector::from_json).collect::<Result<Vec<_>>>()?;
        let mut c = Vec::new();
        for e in &j.c {
            let (a, b, k) = e.indices()?;
            let v = match &e.poly_or_rational {
                ValueJson::Rational(r) => PolyScalar::constant(j.base, r.to_rational()?),
                ValueJson::Poly(t) => poly_from_json(j.base, t)?,
            };
            c.push((a, b, k, v));
        }
        Self::new(j.base, anchors, c)
    }
}

/// `{"base": m, "anchors": [tensor, ...], "c": [{"i", "j", "k", "poly_or_rational"}]}`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidJson {
    pub base: usize,
    pub anchors: Vec<TensorJson>,
    #[serde(default)]
    pub c: Vec<ConstantJson>,
}

pub fn algebroid_to_linear_poisson(a: &LieAlgebroidData) -> PoissonBivector {
    let m = a.base_dim;
    let n = a.rank();
    let d = m + n;
    let mut pi = PolyKVector::zero(d, 2);
    for (&(i, j, k), v) in &a.c {
        pi.insert(&[m + i, m + j], &v.embed(d, 0) * &PolyScalar::var(d, m + k));
    }
    for (i, anchor) in a.anchors.iter().enumerate() {
        for (idx, v) in anchor.components() {
            pi.insert(&[m + i, idx[0]], v.embed(d, 0));
        }
    }
    PoissonBivector::new(pi).unwrap()
}

/// Reads off anchor and structure functions; every component must have the
/// fiber degree forced by the linear form (x–x: none, x–y: 0, y–y: 1).
pub fn linear_poisson_to_algebroid(pi: &PoissonBivector, m: usize, n: usize) -> Result<LieAlgebroidData> {
    check_dim(m + n, pi.dim())?;
    let fiber = m..m + n;
    let mut bad = Vec::new();
    let mut anchor_comps: Vec<Vec<(Vec<usize>, PolyScalar)>> = vec![Vec::new(); n];
    let mut c = Vec::new();
    for (idx, p) in pi.bivector().components() {
        let (r, s) = (idx[0], idx[1]);
        let label = |what: &str| format!("({}, {}): {what}", r + 1, s + 1);
        match (r >= m, s >= m) {
            (false, false) => bad.push(label("base-base component must vanish")),
            (false, true) => match p.restrict(0..m) {
                // π^{x_r y_i} = −a_i^r
                Some(base) => anchor_comps[s - m].push((vec![r], -base)),
                None => bad.push(label("expected fiber degree 0")),
            },
            (true, false) => unreachable!("components are stored with sorted indices"),
            (true, true) => {
                if p.degrees_in(fiber.clone()).any(|d| d != 1) {
                    bad.push(label("expected fiber degree 1"));
                    continue;
                }
                for k in 0..n {
                    let coeff = p.derivative(m + k);
                    if let Some(base) = coeff.restrict(0..m) {
                        if !base.is_zero() {
                            c.push((r - m, s - m, k, base));
                        }
                    }
                }
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::NonLinear(bad));
    }
    let anchors = anchor_comps
        .into_iter()
        .map(|comps| PolyKVector::from_components(m, 1, comps))
        .collect();
    LieAlgebroidData::new(m, anchors, c)
}
