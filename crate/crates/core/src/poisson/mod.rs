//! Poisson bivectors on polynomial charts.
//!
//! Conventions: `{f, g} = π(df, dg)`, `π♯μ = π(μ, ·)`, and the Hamiltonian
//! vector field is `X_f = π♯(df) = {f, ·}`. For the standard structure
//! `Σ ∂_{q_i}∧∂_{p_i}` this gives `{q, p} = 1` and `X_q = ∂_p`.

mod algebroid;
mod euler;
mod leaf;
mod moser;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use algebroid::{algebroid_to_linear_poisson, linear_poisson_to_algebroid, LieAlgebroidData};
pub use euler::{euler_linearize, EulerReport};
pub use leaf::{leaf_data_at_point, LeafData};
pub use moser::{moser_verify, FormFamily};

use crate::error::{check_dim, Error, Result};
use crate::fields::json::RationalJson;
use crate::fields::{PolyKForm, PolyKVector, PolyScalar, Rational};

/// A bivector field, with a cached exact Jacobi check.
#[derive(Clone, Debug)]
pub struct PoissonBivector {
    pi: PolyKVector,
    poisson: OnceLock<bool>,
}

impl PartialEq for PoissonBivector {
    fn eq(&self, other: &Self) -> bool {
        self.pi == other.pi
    }
}

impl PoissonBivector {
    pub fn new(pi: PolyKVector) -> Result<Self> {
        if pi.degree() != 2 {
            return Err(Error::Degree(format!("expected a bivector, got degree {}", pi.degree())));
        }
        Ok(PoissonBivector {
            pi,
            poisson: OnceLock::new(),
        })
    }

    /// `Σ ∂_{q_i}∧∂_{p_i}` on ℝ²ⁿ with coordinates `(q_1..q_n, p_1..p_n)`.
    pub fn standard_symplectic(n: usize) -> Self {
        let d = 2 * n;
        let pi = PolyKVector::from_components(d, 2, (0..n).map(|i| (vec![i, n + i], PolyScalar::one(d))));
        Self::new(pi).unwrap()
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(PolyKVector::zero(dim, 2)).unwrap()
    }

    pub fn bivector(&self) -> &PolyKVector {
        &self.pi
    }

    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    /// `π^{ij} = π(dx_i, dx_j)` for any `i, j`.
    pub fn entry(&self, i: usize, j: usize) -> PolyScalar {
        self.pi.component(&[i, j])
    }

    pub fn bracket(&self, f: &PolyScalar, g: &PolyScalar) -> Result<PolyScalar> {
        check_dim(self.dim(), f.nvars())?;
        check_dim(self.dim(), g.nvars())?;
        let mut out = PolyScalar::zero(self.dim());
        for (idx, p) in self.pi.components() {
            let (i, j) = (idx[0], idx[1]);
            let t = &(&f.derivative(i) * &g.derivative(j)) - &(&f.derivative(j) * &g.derivative(i));
            out += &(p * &t);
        }
        Ok(out)
    }

    /// `Υ_π` with `Υ^{ijk} = Jac(x_i, x_j, x_k)`.
    pub fn jacobiator(&self) -> PolyKVector {
        let n = self.dim();
        // {x_i, F} = Σ_l π^{il} ∂_l F
        let with_coord = |i: usize, f: &PolyScalar| {
            let mut out = PolyScalar::zero(n);
            for l in 0..n {
                let p = self.entry(i, l);
                if !p.is_zero() {
                    out += &(&p * &f.derivative(l));
                }
            }
            out
        };
        let mut comps = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = &(&with_coord(i, &self.entry(j, k)) + &with_coord(j, &self.entry(k, i)))
                        + &with_coord(k, &self.entry(i, j));
                    comps.push((vec![i, j, k], v));
                }
            }
        }
        PolyKVector::from_components(n, 3, comps)
    }

    pub fn is_poisson(&self) -> bool {
        *self.poisson.get_or_init(|| self.jacobiator().is_zero())
    }

    /// `π♯μ = π(μ, ·)`.
    pub fn sharp(&self, mu: &PolyKForm) -> PolyKVector {
        self.pi.contract(mu)
    }

    pub fn hamiltonian_vf(&self, f: &PolyScalar) -> Result<PolyKVector> {
        check_dim(self.dim(), f.nvars())?;
        Ok(self.sharp(&PolyKForm::differential(f)))
    }

    /// Numeric matrix `Π_{ij} = π^{ij}(x)`; then `π♯μ = Πᵀμ`.
    pub fn matrix_at(&self, x: &[f64]) -> DMatrix<f64> {
        self.pi.evaluate_at(x).to_matrix()
    }

    /// The 1-form bracket `[α, β] = L_{π♯α}β − ι_{π♯β}dα`.
    pub fn form_bracket(&self, alpha: &PolyKForm, beta: &PolyKForm) -> PolyKForm {
        let a = self.sharp(alpha);
        let b = self.sharp(beta);
        beta.lie_derivative(&a).sub(&alpha.d().interior(&b).expect("1-form degree"))
    }
}

pub fn bracket(pi: &PoissonBivector, f: &PolyScalar, g: &PolyScalar) -> Result<PolyScalar> {
    pi.bracket(f, g)
}

pub fn jacobiator(pi: &PoissonBivector) -> PolyKVector {
    pi.jacobiator()
}

pub fn is_poisson(pi: &PoissonBivector) -> bool {
    pi.is_poisson()
}

pub fn hamiltonian_vf(pi: &PoissonBivector, f: &PolyScalar) -> Result<PolyKVector> {
    pi.hamiltonian_vf(f)
}

/// Structure constants `[e_i, e_j] = Σ_k c_{ij}^k e_k`, stored for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    n: usize,
    c: BTreeMap<(usize, usize, usize), Rational>,
}

impl StructureConstants {
    pub fn zero(n: usize) -> Self {
        StructureConstants { n, c: BTreeMap::new() }
    }

    /// Accepts entries for any `(i, j)`; the implied antisymmetric partner must agree.
    pub fn new<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, Rational)>,
    {
        let mut given: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for (i, j, k, v) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::Invalid(format!("structure constant index out of range 1..={n}")));
            }
            *given.entry((i, j, k)).or_insert_with(Rational::zero) += v;
        }
        let mut c = BTreeMap::new();
        for (&(i, j, k), v) in &given {
            if i == j {
                if !v.is_zero() {
                    return Err(Error::Invalid(format!(
                        "c_{{{0}{0}}}^{1} must vanish by antisymmetry",
                        i + 1,
                        k + 1
                    )));
                }
                continue;
            }
            let (a, b, val) = if i < j { (i, j, v.clone()) } else { (j, i, -v.clone()) };
            if let Some(partner) = given.get(&(j, i, k)) {
                if &(-partner.clone()) != v {
                    return Err(Error::Invalid(format!(
                        "structure constants are not antisymmetric at (i, j, k) = ({}, {}, {})",
                        i + 1,
                        j + 1,
                        k + 1
                    )));
                }
            }
            if !val.is_zero() {
                c.insert((a, b, k), val);
            }
        }
        Ok(StructureConstants { n, c })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Rational {
        if i < j {
            self.c.get(&(i, j, k)).cloned().unwrap_or_else(Rational::zero)
        } else if i > j {
            -self.c.get(&(j, i, k)).cloned().unwrap_or_else(Rational::zero)
        } else {
            Rational::zero()
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Rational)> {
        self.c.iter()
    }

    /// First `(i, j, k, m)` at which the Jacobi identity fails.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for m in 0..n {
                        let mut s = Rational::zero();
                        for l in 0..n {
                            s += self.get(j, k, l) * self.get(i, l, m);
                            s += self.get(k, i, l) * self.get(j, l, m);
                            s += self.get(i, j, l) * self.get(k, l, m);
                        }
                        if !s.is_zero() {
                            return Some((i, j, k, m));
                        }
                    }
                }
            }
        }
        None
    }

    /// `so(3)`: `[e_1, e_2] = e_3` and cyclic.
    pub fn so3() -> Self {
        let one = crate::fields::rat(1);
        Self::new(3, [(0, 1, 2, one.clone()), (1, 2, 0, one.clone()), (2, 0, 1, one)]).unwrap()
    }

    pub fn to_json(&self) -> StructureConstantsJson {
        StructureConstantsJson {
            n: self.n,
            c: self
                .c
                .iter()
                .map(|(&(i, j, k), v)| ConstantJson {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    poly_or_rational: ValueJson::Rational(RationalJson::from_rational(v)),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &StructureConstantsJson) -> Result<Self> {
        let mut entries = Vec::new();
        for e in &j.c {
            let (i, jj, k) = e.indices()?;
            let v = match &e.poly_or_rational {
                ValueJson::Rational(r) => r.to_rational()?,
                ValueJson::Poly(_) => {
                    return Err(Error::Invalid("Lie algebra structure constants must be rational".into()))
                }
            };
            entries.push((i, jj, k, v));
        }
        Self::new(j.n, entries)
    }
}

/// `{"n": k, "c": [{"i": 1, "j": 2, "k": 3, "poly_or_rational": ...}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConstantsJson {
    pub n: usize,
    pub c: Vec<ConstantJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub poly_or_rational: ValueJson,
}

impl ConstantJson {
    pub(crate) fn indices(&self) -> Result<(usize, usize, usize)> {
        if self.i == 0 || self.j == 0 || self.k == 0 {
            return Err(Error::Invalid("structure constant indices are 1-based".into()));
        }
        Ok((self.i - 1, self.j - 1, self.k - 1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueJson {
    Rational(RationalJson),
    Poly(Vec<crate::fields::json::TermJson>),
}

/// `π = ½ Σ c_{ij}^k μ_k ∂_i∧∂_j` on 𝔤*.
pub fn lie_poisson(c: &StructureConstants) -> PoissonBivector {
    let n = c.dim();
    let mut pi = PolyKVector::zero(n, 2);
    for (&(i, j, k), v) in c.entries() {
        pi.insert(&[i, j], PolyScalar::var(n, k).scale(v));
    }
    PoissonBivector::new(pi).unwrap()
}

/// Inverse of [`lie_poisson`] on linear bivectors.
pub fn lie_poisson_constants(pi: &PoissonBivector) -> Result<StructureConstants> {
    let n = pi.dim();
    let mut entries = Vec::new();
    for (idx, p) in pi.bivector().components() {
        for (m, v) in p.terms() {
            if m.degree() != 1 {
                return Err(Error::NonLinear(vec![format!(
                    "({}, {}) has a term of degree {}",
                    idx[0] + 1,
                    idx[1] + 1,
                    m.degree()
                )]));
            }
            let k = m.exps().iter().position(|&e| e == 1).unwrap();
            entries.push((idx[0], idx[1], k, v.clone()));
        }
    }
    StructureConstants::new(n, entries)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::fields::random::RandomPoly;
    use crate::fields::{rat, ratio};

    fn x(n: usize, i: usize) -> PolyScalar {
        PolyScalar::var(n, i)
    }

    pub(crate) fn nonpoisson_r3() -> PoissonBivector {
        // z ∂x∧∂y + x ∂y∧∂z + x ∂z∧∂x
        let pi = PolyKVector::from_components(3, 2, [(vec![0, 1], x(3, 2)), (vec![1, 2], x(3, 0)), (vec![2, 0], x(3, 0))]);
        PoissonBivector::new(pi).unwrap()
    }

    /// Jac(f, g, h) expanded straight from nested brackets.
    fn jac_direct(pi: &PoissonBivector, f: &PolyScalar, g: &PolyScalar, h: &PolyScalar) -> PolyScalar {
        let b = |a: &PolyScalar, c: &PolyScalar| pi.bracket(a, c).unwrap();
        &(&b(f, &b(g, h)) + &b(g, &b(h, f))) + &b(h, &b(f, g))
    }

    #[test]
    fn standard_bracket() {
        let pi = PoissonBivector::standard_symplectic(1);
        assert_eq!(pi.bracket(&x(2, 0), &x(2, 1)).unwrap(), PolyScalar::one(2));
        let f = &x(2, 0).pow(2) + &x(2, 1);
        assert!(pi.bracket(&f, &f).unwrap().is_zero());
        assert!(pi.is_poisson());
    }

    #[test]
    fn so3_bracket() {
        let pi = lie_poisson(&StructureConstants::so3());
        assert_eq!(pi.bracket(&x(3, 0), &x(3, 1)).unwrap(), x(3, 2));
        assert_eq!(pi.entry(1, 2), x(3, 0));
        assert_eq!(pi.entry(2, 0), x(3, 1));
        assert!(pi.is_poisson());
    }

    #[test]
    fn nonpoisson_example_has_minus_z() {
        let pi = nonpoisson_r3();
        let oracle = jac_direct(&pi, &x(3, 0), &x(3, 1), &x(3, 2));
        assert_eq!(oracle, -x(3, 2));
        assert_eq!(pi.jacobiator().component(&[0, 1, 2]), oracle);
        assert!(!pi.is_poisson());
    }

    #[test]
    fn two_dim_algebra_gives_x_dx_dy() {
        let c = StructureConstants::new(2, [(0, 1, 0, rat(1))]).unwrap();
        let pi = lie_poisson(&c);
        assert_eq!(pi.entry(0, 1), x(2, 0));
        assert!(lie_poisson(&StructureConstants::zero(3)).bivector().is_zero());
    }

    #[test]
    fn non_antisymmetric_constants_rejected() {
        let r = StructureConstants::new(2, [(0, 1, 0, rat(1)), (1, 0, 0, rat(1))]);
        assert!(r.is_err());
        assert!(StructureConstants::new(2, [(0, 0, 1, rat(1))]).is_err());
    }

    #[test]
    fn lie_poisson_poisson_iff_jacobi() {
        assert!(StructureConstants::so3().jacobi_violation().is_none());
        let broken = StructureConstants::new(3, [(0, 1, 2, rat(1)), (1, 2, 0, rat(1)), (2, 0, 1, rat(2)), (0, 1, 0, rat(1))])
            .unwrap();
        assert!(broken.jacobi_violation().is_some());
        assert!(!lie_poisson(&broken).is_poisson());
        let ok = StructureConstants::new(3, [(0, 1, 2, rat(1)), (1, 2, 0, rat(1)), (2, 0, 1, rat(2))]).unwrap();
        assert!(ok.jacobi_violation().is_none());
        assert!(lie_poisson(&ok).is_poisson());
    }

    #[test]
    fn hamiltonian_of_q_is_d_dp() {
        let pi = PoissonBivector::standard_symplectic(1);
        let xq = pi.hamiltonian_vf(&x(2, 0)).unwrap();
        assert_eq!(xq, PolyKVector::from_vec(vec![PolyScalar::zero(2), PolyScalar::one(2)]));
        assert!(pi.hamiltonian_vf(&PolyScalar::from_int(2, 7)).unwrap().is_zero());
    }

    #[test]
    fn one_form_bracket_on_exact_forms() {
        let pi = lie_poisson(&StructureConstants::so3());
        let f = &x(3, 0) * &x(3, 1);
        let g = &x(3, 2).pow(2) + &x(3, 0);
        let lhs = pi.form_bracket(&PolyKForm::differential(&f), &PolyKForm::differential(&g));
        assert_eq!(lhs, PolyKForm::differential(&pi.bracket(&f, &g).unwrap()));
    }

    #[test]
    fn constants_json_round_trip() {
        let c = StructureConstants::new(3, [(0, 1, 2, ratio(1, 2))]).unwrap();
        let text = serde_json::to_string(&c.to_json()).unwrap();
        let back: StructureConstantsJson = serde_json::from_str(&text).unwrap();
        assert_eq!(StructureConstants::from_json(&back).unwrap(), c);
    }

    fn random_poisson(rng: &mut ChaCha8Rng) -> PoissonBivector {
        // Poisson by construction: 2-dim charts, or Lie–Poisson structures
        // with a Casimir factor f·π on so(3)*.
        let g = RandomPoly { max_degree: 2, max_terms: 3, coeff_bound: 3 };
        if rng.gen_bool(0.5) {
            PoissonBivector::new(g.tensor(rng, 2, 2)).unwrap()
        } else {
            let casimir = &(&x(3, 0).pow(2) + &x(3, 1).pow(2)) + &x(3, 2).pow(2);
            let f = g.poly(rng, 1).compose(&[casimir]);
            let base = lie_poisson(&StructureConstants::so3());
            PoissonBivector::new(base.bivector().mul_scalar(&f)).unwrap()
        }
    }

    use rand::Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn hamiltonian_fields_form_a_lie_algebra(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pi = random_poisson(&mut rng);
            prop_assert!(pi.is_poisson());
            let n = pi.dim();
            let g = RandomPoly { max_degree: 2, max_terms: 3, coeff_bound: 3 };
            let f = g.poly(&mut rng, n);
            let h = g.poly(&mut rng, n);
            let lhs = pi.hamiltonian_vf(&f).unwrap().bracket(&pi.hamiltonian_vf(&h).unwrap());
            let rhs = pi.hamiltonian_vf(&pi.bracket(&f, &h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn jacobiator_matches_nested_brackets(seed in any::<u64>(), n in 2usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = RandomPoly { max_degree: 2, max_terms: 2, coeff_bound: 3 };
            let pi = PoissonBivector::new(g.tensor(&mut rng, n, 2)).unwrap();
            let (f, h, k) = (g.poly(&mut rng, n), g.poly(&mut rng, n), g.poly(&mut rng, n));
            // Υ(df, dg, dh) = Σ Υ^{ijk} ∂_i f ∂_j g ∂_k h over all index triples
            let up = pi.jacobiator();
            let mut contracted = PolyScalar::zero(n);
            for i in 0..n { for j in 0..n { for l in 0..n {
                let c = up.component(&[i, j, l]);
                if c.is_zero() { continue; }
                contracted += &(&(&c * &f.derivative(i)) * &(&h.derivative(j) * &k.derivative(l)));
            }}}
            prop_assert_eq!(contracted, jac_direct(&pi, &f, &h, &k));
        }

        #[test]
        fn jacobiator_is_antisymmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = RandomPoly { max_degree: 2, max_terms: 2, coeff_bound: 3 };
            let pi = PoissonBivector::new(g.tensor(&mut rng, 4, 2)).unwrap();
            let up = pi.jacobiator();
            let (f, h, k) = (x(4, 0), x(4, 1), x(4, 3));
            let j1 = jac_direct(&pi, &f, &h, &k);
            prop_assert_eq!(&up.component(&[0, 1, 3]), &j1);
            prop_assert_eq!(up.component(&[1, 0, 3]), -j1.clone());
            prop_assert_eq!(up.component(&[3, 1, 0]), -j1);
        }

        #[test]
        fn leibniz_rule(seed in any::<u64>(), n in 2usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = RandomPoly { max_degree: 2, max_terms: 3, coeff_bound: 3 };
            let pi = PoissonBivector::new(g.tensor(&mut rng, n, 2)).unwrap();
            let (f, a, b) = (g.poly(&mut rng, n), g.poly(&mut rng, n), g.poly(&mut rng, n));
            let lhs = pi.bracket(&f, &(&a * &b)).unwrap();
            let rhs = &(&pi.bracket(&f, &a).unwrap() * &b) + &(&a * &pi.bracket(&f, &b).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn constants_round_trip(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let entries: Vec<_> = (0..6).map(|_| {
                (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
            }).filter(|e| e.0 < e.1).collect();
            let c = StructureConstants::new(n, entries).unwrap();
            prop_assert_eq!(lie_poisson_constants(&lie_poisson(&c)).unwrap(), c);
        }
    }
}
