//! Manin triples and the Poisson Lie group structures they induce.
//!
//! Vectors in `𝔡` are coordinate columns in a fixed basis `e_1..e_d`; the
//! bracket is `[e_a, e_b] = Σ_c C_ab^c e_c` and the metric is `B_ab = ⟨e_a, e_b⟩`.
//! Subspaces are given by basis columns in these coordinates.

mod builtin;
mod chart;
mod drinfeld;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use builtin::{builtin, builtin_triples, double, semidirect, BuiltinTriple, BUILTIN_NAMES};
pub use chart::{AdRule, GroupChart, AD_TOL};
pub use drinfeld::{
    chart_bivector, chart_jacobiator, drinfeld_bivector, dressing_action, dressing_vector_field, e_map_residuals,
    homogeneous_space_check, verify_multiplicativity, EMapReport, HomogeneousReport, HomogeneousSpaceData,
};

use crate::error::{Error, Result};
use crate::exact::RatMatrix;
use crate::fields::json::RationalJson;
use crate::fields::Rational;

/// Outcome of an exact check, with a human-readable witness on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<String>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    fn fail(w: String) -> Self {
        Verdict {
            holds: false,
            witness: Some(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetrizedLieAlgebra {
    dim: usize,
    /// `C_ab^c` at `(a·d + b)·d + c`.
    c: Vec<Rational>,
    b: RatMatrix,
}

/// Exact Jacobi identity, antisymmetry and `ad`-invariance of `B`.
/// `c` is dense with `C_ab^k` at `(a·d + b)·d + k`.
pub fn check_metrized(dim: usize, c: &[Rational], b: &RatMatrix) -> Verdict {
    if c.len() != dim * dim * dim || b.nrows() != dim || b.ncols() != dim {
        return Verdict::fail(format!("expected {dim}³ constants and a {dim}×{dim} metric"));
    }
    let at = |a: usize, bb: usize, k: usize| &c[(a * dim + bb) * dim + k];
    for a in 0..dim {
        for bb in 0..dim {
            for k in 0..dim {
                if *at(a, bb, k) != -at(bb, a, k).clone() {
                    return Verdict::fail(format!("C is not antisymmetric at ({}, {}, {})", a + 1, bb + 1, k + 1));
                }
            }
            if b[(a, bb)] != b[(bb, a)] {
                return Verdict::fail(format!("B is not symmetric at ({}, {})", a + 1, bb + 1));
            }
        }
    }
    if b.inverse().is_none() {
        return Verdict::fail("B is degenerate".into());
    }
    // [[a, b], c] + [[b, c], a] + [[c, a], b], component m
    for a in 0..dim {
        for bb in a + 1..dim {
            for cc in bb + 1..dim {
                for m in 0..dim {
                    let mut s = Rational::zero();
                    for l in 0..dim {
                        s += at(a, bb, l) * at(l, cc, m) + at(bb, cc, l) * at(l, a, m) + at(cc, a, l) * at(l, bb, m);
                    }
                    if !s.is_zero() {
                        return Verdict::fail(format!(
                            "Jacobi fails for (e{}, e{}, e{}) in component {}",
                            a + 1,
                            bb + 1,
                            cc + 1,
                            m + 1
                        ));
                    }
                }
            }
        }
    }
    // B([x, y], z) + B(y, [x, z]) = 0
    for x in 0..dim {
        for y in 0..dim {
            for z in y..dim {
                let mut s = Rational::zero();
                for l in 0..dim {
                    s += at(x, y, l) * &b[(l, z)] + &b[(y, l)] * at(x, z, l);
                }
                if !s.is_zero() {
                    return Verdict::fail(format!(
                        "B is not ad-invariant: B([e{x1}, e{y1}], e{z1}) + B(e{y1}, [e{x1}, e{z1}]) = {s}",
                        x1 = x + 1,
                        y1 = y + 1,
                        z1 = z + 1
                    ));
                }
            }
        }
    }
    Verdict::pass()
}

impl MetrizedLieAlgebra {
    pub fn new(dim: usize, c: Vec<Rational>, b: RatMatrix) -> Result<Self> {
        let v = check_metrized(dim, &c, &b);
        if let Some(w) = v.witness {
            return Err(Error::Invalid(w));
        }
        Ok(MetrizedLieAlgebra { dim, c, b })
    }

    /// From sparse constants `(a, b, k) ↦ C_ab^k`, completed by antisymmetry.
    pub fn from_sparse<I>(dim: usize, entries: I, b: RatMatrix) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, usize), Rational)>,
    {
        let mut given: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for ((a, bb, k), v) in entries {
            if a >= dim || bb >= dim || k >= dim {
                return Err(Error::Invalid(format!("structure constant ({a}, {bb}, {k}) out of range")));
            }
            if a == bb && !v.is_zero() {
                return Err(Error::Invalid(format!("[e{0}, e{0}] must vanish", a + 1)));
            }
            for (key, val) in [((a, bb, k), v.clone()), ((bb, a, k), -v)] {
                if let Some(prev) = given.get(&key) {
                    if *prev != val {
                        return Err(Error::Invalid(format!(
                            "inconsistent constants for [e{}, e{}]",
                            key.0 + 1,
                            key.1 + 1
                        )));
                    }
                }
                given.insert(key, val);
            }
        }
        let mut c = vec![Rational::zero(); dim * dim * dim];
        for ((a, bb, k), v) in given {
            c[(a * dim + bb) * dim + k] = v;
        }
        Self::new(dim, c, b)
    }

    /// Structure constants and metric of the real span of `basis`, a set of
    /// matrices closed under commutators.
    pub fn from_matrices(basis: &[RatMatrix], metric: impl Fn(&RatMatrix, &RatMatrix) -> Rational) -> Result<Self> {
        let d = basis.len();
        let flat = |m: &RatMatrix| -> Vec<Rational> {
            (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|ij| m[ij].clone()).collect()
        };
        let a = RatMatrix::from_columns(flat(&basis[0]).len(), &basis.iter().map(flat).collect::<Vec<_>>());
        let mut c = vec![Rational::zero(); d * d * d];
        for i in 0..d {
            for j in 0..d {
                let xy = &basis[i] * &basis[j];
                let yx = &basis[j] * &basis[i];
                let comm = RatMatrix::from_fn(xy.nrows(), xy.ncols(), |r, s| &xy[(r, s)] - &yx[(r, s)]);
                let coords = a
                    .solve(&flat(&comm))
                    .ok_or_else(|| Error::Invalid(format!("basis is not closed under [X{}, X{}]", i + 1, j + 1)))?;
                for (k, v) in coords.into_iter().enumerate() {
                    c[(i * d + j) * d + k] = v;
                }
            }
        }
        let b = RatMatrix::from_fn(d, d, |i, j| metric(&basis[i], &basis[j]));
        Self::new(d, c, b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, a: usize, b: usize, k: usize) -> &Rational {
        &self.c[(a * self.dim + b) * self.dim + k]
    }

    pub fn metric(&self) -> &RatMatrix {
        &self.b
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim;
        let mut out = vec![Rational::zero(); d];
        for a in 0..d {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..d {
                if y[b].is_zero() {
                    continue;
                }
                let xy = &x[a] * &y[b];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(a, b, k);
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        out
    }

    pub fn pairing(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let by = self.b.apply(y);
        x.iter().zip(&by).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `ad_x` as a `d × d` float matrix.
    pub fn ad_f64(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        let cf = self.c_f64();
        DMatrix::from_fn(d, d, |k, b| (0..d).map(|a| x[a] * cf[(a * d + b) * d + k]).sum())
    }

    pub fn bracket_f64(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad_f64(x.as_slice()) * y
    }

    pub fn metric_f64(&self) -> DMatrix<f64> {
        self.b.to_f64()
    }

    fn c_f64(&self) -> Vec<f64> {
        self.c.iter().map(crate::fields::rat_to_f64).collect()
    }

    /// `𝔡 ⊕ 𝔡̄`: the direct sum with metric `B ⊕ −B`.
    pub fn with_opposite(&self) -> Self {
        let d = self.dim;
        let n = 2 * d;
        let mut c = vec![Rational::zero(); n * n * n];
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    let v = self.constant(a, b, k).clone();
                    c[(a * n + b) * n + k] = v.clone();
                    c[((a + d) * n + b + d) * n + k + d] = v;
                }
            }
        }
        let b = RatMatrix::from_fn(n, n, |i, j| match (i < d, j < d) {
            (true, true) => self.b[(i, j)].clone(),
            (false, false) => -self.b[(i - d, j - d)].clone(),
            _ => Rational::zero(),
        });
        MetrizedLieAlgebra { dim: n, c, b }
    }
}

#[derive(Clone, Debug)]
pub struct ManinTriple {
    d: MetrizedLieAlgebra,
    g: RatMatrix,
    h: RatMatrix,
    /// `[G | H]⁻¹`, splitting `ζ` into `g`- and `h`-coordinates.
    split: DMatrix<f64>,
}

/// Exact verification of the Manin triple axioms for `g, h ⊂ 𝔡`.
pub fn check_manin_triple(d: &MetrizedLieAlgebra, g: &RatMatrix, h: &RatMatrix) -> Verdict {
    let dim = d.dim();
    for (name, s) in [("g", g), ("h", h)] {
        if s.nrows() != dim {
            return Verdict::fail(format!("{name} basis vectors must have {dim} entries"));
        }
        if 2 * s.ncols() != dim || s.rank() != s.ncols() {
            return Verdict::fail(format!("{name} must have an independent basis of {} vectors", dim / 2));
        }
        let cols = s.columns();
        for (i, x) in cols.iter().enumerate() {
            for (j, y) in cols.iter().enumerate().skip(i) {
                let v = d.pairing(x, y);
                if !v.is_zero() {
                    return Verdict::fail(format!(
                        "{name} is not Lagrangian: ⟨{name}{}, {name}{}⟩ = {v}",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        for (i, x) in cols.iter().enumerate() {
            for (j, y) in cols.iter().enumerate().skip(i + 1) {
                let br = RatMatrix::from_columns(dim, &[d.bracket(x, y)]);
                if !s.span_contains(&br) {
                    return Verdict::fail(format!(
                        "{name} is not a subalgebra: [{name}{}, {name}{}] leaves it",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
    }
    if g.hstack(h).rank() != dim {
        return Verdict::fail("g and h do not span d".into());
    }
    Verdict::pass()
}

impl ManinTriple {
    pub fn new(d: MetrizedLieAlgebra, g: RatMatrix, h: RatMatrix) -> Result<Self> {
        if let Some(w) = check_manin_triple(&d, &g, &h).witness {
            return Err(Error::Invalid(w));
        }
        let split = g.hstack(&h).inverse().expect("complementary subspaces").to_f64();
        Ok(ManinTriple { d, g, h, split })
    }

    /// `(𝔡, 𝔥, 𝔤)`.
    pub fn dual(&self) -> Self {
        Self::new(self.d.clone(), self.h.clone(), self.g.clone()).expect("the dual of a Manin triple is one")
    }

    pub fn algebra(&self) -> &MetrizedLieAlgebra {
        &self.d
    }

    pub fn g_basis(&self) -> &RatMatrix {
        &self.g
    }

    pub fn h_basis(&self) -> &RatMatrix {
        &self.h
    }

    /// `dim 𝔤 = dim 𝔥`.
    pub fn half_dim(&self) -> usize {
        self.g.ncols()
    }

    pub fn check(&self) -> Verdict {
        check_manin_triple(&self.d, &self.g, &self.h)
    }

    /// Coordinates of `pr_g ζ` in the `g`-basis and of `pr_h ζ` in the `h`-basis.
    pub fn split(&self, zeta: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let n = self.half_dim();
        let ab = &self.split * zeta;
        (ab.rows(0, n).into_owned(), ab.rows(n, n).into_owned())
    }

    pub fn pr_g(&self, zeta: &DVector<f64>) -> DVector<f64> {
        self.g.to_f64() * self.split(zeta).0
    }

    pub fn pr_h(&self, zeta: &DVector<f64>) -> DVector<f64> {
        self.h.to_f64() * self.split(zeta).1
    }

    /// `Q_kb = ⟨g_k, h_b⟩`.
    pub fn pairing_gh(&self) -> DMatrix<f64> {
        self.g.to_f64().transpose() * self.d.metric_f64() * self.h.to_f64()
    }

    pub fn to_json(&self, builtin_ad: Option<String>) -> TripleJson {
        let d = self.d.dim();
        let mut c = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                for k in 0..d {
                    let v = self.d.constant(a, b, k);
                    if !v.is_zero() {
                        c.push(TripleConstantJson {
                            i: a + 1,
                            j: b + 1,
                            k: k + 1,
                            value: RationalJson::from_rational(v),
                        });
                    }
                }
            }
        }
        let mat = |m: &RatMatrix| -> Vec<Vec<RationalJson>> {
            m.columns().iter().map(|col| col.iter().map(RationalJson::from_rational).collect()).collect()
        };
        TripleJson {
            dim: d,
            c,
            b: (0..d)
                .map(|i| (0..d).map(|j| RationalJson::from_rational(&self.d.metric()[(i, j)])).collect())
                .collect(),
            g_basis: mat(&self.g),
            h_basis: mat(&self.h),
            builtin_ad,
        }
    }

    pub fn from_json(j: &TripleJson) -> Result<Self> {
        let d = j.dim;
        let entries = j
            .c
            .iter()
            .map(|e| {
                if e.i == 0 || e.j == 0 || e.k == 0 {
                    return Err(Error::Invalid("structure constant indices are 1-based".into()));
                }
                Ok(((e.i - 1, e.j - 1, e.k - 1), e.value.to_rational()?))
            })
            .collect::<Result<Vec<_>>>()?;
        if j.b.len() != d || j.b.iter().any(|r| r.len() != d) {
            return Err(Error::Invalid(format!("B must be {d}×{d}")));
        }
        let mut b = RatMatrix::zeros(d, d);
        for (r, row) in j.b.iter().enumerate() {
            for (s, v) in row.iter().enumerate() {
                b[(r, s)] = v.to_rational()?;
            }
        }
        let cols = |v: &[Vec<RationalJson>], name: &str| -> Result<RatMatrix> {
            let cols = v
                .iter()
                .map(|c| {
                    if c.len() != d {
                        return Err(Error::Invalid(format!("{name} vectors must have {d} entries")));
                    }
                    c.iter().map(RationalJson::to_rational).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RatMatrix::from_columns(d, &cols))
        };
        let alg = MetrizedLieAlgebra::from_sparse(d, entries, b)?;
        Self::new(alg, cols(&j.g_basis, "g_basis")?, cols(&j.h_basis, "h_basis")?)
    }
}

/// One structure constant on the wire: `[e_i, e_j]` has `value` in `e_k` (1-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConstantJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: RationalJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    pub dim: usize,
    #[serde(rename = "C")]
    pub c: Vec<TripleConstantJson>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<RationalJson>>,
    pub g_basis: Vec<Vec<RationalJson>>,
    pub h_basis: Vec<Vec<RationalJson>>,
    #[serde(default)]
    pub builtin_ad: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::rat;
    use crate::poisson::StructureConstants;

    fn so3_killing() -> (Vec<Rational>, RatMatrix) {
        let s = StructureConstants::so3();
        let mut c = vec![Rational::zero(); 27];
        for a in 0..3 {
            for b in 0..3 {
                for k in 0..3 {
                    c[(a * 3 + b) * 3 + k] = s.get(a, b, k);
                }
            }
        }
        // the Killing form of so(3) is −2·identity
        (c, RatMatrix::from_fn(3, 3, |i, j| if i == j { rat(-2) } else { rat(0) }))
    }

    #[test]
    fn so3_with_killing_metric() {
        let (c, b) = so3_killing();
        assert!(check_metrized(3, &c, &b).holds);
    }

    #[test]
    fn abelian_with_any_metric() {
        let b = RatMatrix::from_fn(2, 2, |i, j| rat(if i == j { 1 } else { 3 }));
        assert!(check_metrized(2, &vec![Rational::zero(); 8], &b).holds);
    }

    #[test]
    fn broken_constants_are_caught() {
        let (mut c, b) = so3_killing();
        // perturb C_12^3 and C_21^3 together, keeping antisymmetry
        c[5] = rat(2);
        c[(3 + 0) * 3 + 2] = rat(-2);
        let v = check_metrized(3, &c, &b);
        assert!(!v.holds);
        assert!(v.witness.unwrap().contains("ad-invariant"));
        // a non-Lie bracket: [e1, e2] = e1 + e3, [e1, e3] = e2, [e2, e3] = e1
        let mut c = vec![Rational::zero(); 27];
        let mut set = |a: usize, b: usize, k: usize, v: i64| {
            c[(a * 3 + b) * 3 + k] = rat(v);
            c[(b * 3 + a) * 3 + k] = rat(-v);
        };
        set(0, 1, 0, 1);
        set(0, 1, 2, 1);
        set(0, 2, 1, 1);
        set(1, 2, 0, 1);
        let v = check_metrized(3, &c, &RatMatrix::identity(3));
        assert!(v.witness.unwrap().contains("Jacobi"));
    }

    #[test]
    fn non_lagrangian_h_is_rejected() {
        let t = builtin("standard_sl2").unwrap().triple;
        // replace h by g_Δ's neighbour span{(H, 0), (E, 0), (F, 0)}, which is not isotropic
        let h = RatMatrix::from_fn(6, 3, |i, j| rat(if i == j { 1 } else { 0 }));
        let v = check_manin_triple(t.algebra(), t.g_basis(), &h);
        assert!(!v.holds);
        assert!(v.witness.unwrap().contains("Lagrangian"));
    }

    #[test]
    fn dual_triples_pass() {
        for b in builtin_triples() {
            assert!(b.triple.check().holds, "{}", b.name);
            assert!(b.triple.dual().check().holds, "{}", b.name);
        }
    }

    #[test]
    fn json_round_trip() {
        let t = builtin("iwasawa_su2").unwrap().triple;
        let j = t.to_json(Some("iwasawa_su2".into()));
        let text = serde_json::to_string(&j).unwrap();
        let back = ManinTriple::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.algebra(), t.algebra());
        assert_eq!(back.g_basis(), t.g_basis());
        assert_eq!(back.h_basis(), t.h_basis());
    }

    #[test]
    fn split_recovers_the_parts() {
        let t = builtin("iwasawa_su2").unwrap().triple;
        let z = DVector::from_vec(vec![0.3, -1.0, 0.5, 2.0, 0.1, -0.7]);
        let s = t.pr_g(&z) + t.pr_h(&z);
        assert!((s - z).amax() < 1e-14);
    }
}
