//! Alternating polynomial tensors: multivector fields and differential forms.
//!
//! Components are keyed by strictly increasing 0-based index tuples. The
//! component stored under `(i₁,…,i_k)` is the coefficient of
//! `∂_{i₁}∧…∧∂_{i_k}` (multivectors) or `dx_{i₁}∧…∧dx_{i_k}` (forms).

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::marker::PhantomData;

use nalgebra::{DMatrix, DVector};

use super::map::{PolyMap, SmoothMap};
use super::poly::{PolyScalar, Rational};
use crate::error::{check_dim, Error, Result};

pub trait Kind: Clone + Copy + Debug + Default + PartialEq + Eq + Hash + Send + Sync + 'static {
    const NAME: &'static str;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct VectorKind;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormKind;

impl Kind for VectorKind {
    const NAME: &'static str = "vector";
}

impl Kind for FormKind {
    const NAME: &'static str = "form";
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alternating<K: Kind> {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, PolyScalar>,
    kind: PhantomData<K>,
}

pub type PolyKVector = Alternating<VectorKind>;
pub type PolyKForm = Alternating<FormKind>;

/// Sorts an index tuple, returning the sign of the permutation, or `None`
/// when an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, odd))
    }
}

impl<K: Kind> Alternating<K> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Alternating {
            dim,
            degree,
            comps: BTreeMap::new(),
            kind: PhantomData,
        }
    }

    pub fn scalar(f: PolyScalar) -> Self {
        let mut t = Self::zero(f.nvars(), 0);
        t.insert(&[], f);
        t
    }

    /// Components may be given in any index order; repeated indices vanish.
    pub fn from_components<I>(dim: usize, degree: usize, comps: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, PolyScalar)>,
    {
        let mut t = Self::zero(dim, degree);
        for (idx, p) in comps {
            t.insert(&idx, p);
        }
        t
    }

    /// Checked variant of [`from_components`](Self::from_components) for untrusted input.
    pub fn try_from_components<I>(dim: usize, degree: usize, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, PolyScalar)>,
    {
        let mut t = Self::zero(dim, degree);
        for (idx, p) in comps {
            if idx.len() != degree {
                return Err(Error::Degree(format!(
                    "component {:?} has {} indices, expected {degree}",
                    idx,
                    idx.len()
                )));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::Invalid(format!("index {} out of range 1..={dim}", bad + 1)));
            }
            check_dim(dim, p.nvars())?;
            t.insert(&idx, p);
        }
        Ok(t)
    }

    /// 1-form or vector field from its coefficient list.
    pub fn from_vec(coeffs: Vec<PolyScalar>) -> Self {
        let dim = coeffs.len();
        Self::from_components(dim, 1, coeffs.into_iter().enumerate().map(|(i, p)| (vec![i], p)))
    }

    /// Adds `p` to the component at `idx`, normalizing the index order.
    pub fn insert(&mut self, idx: &[usize], p: PolyScalar) {
        assert_eq!(idx.len(), self.degree, "index tuple length must equal degree");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
        assert_eq!(p.nvars(), self.dim, "coefficient lives on a different chart");
        let Some((sorted, odd)) = sort_with_sign(idx) else {
            return;
        };
        let p = if odd { -p } else { p };
        if p.is_zero() {
            return;
        }
        match self.comps.entry(sorted) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &p;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &PolyScalar)> {
        self.comps.iter()
    }

    /// Component at an arbitrary index tuple, sign-adjusted.
    pub fn component(&self, idx: &[usize]) -> PolyScalar {
        match sort_with_sign(idx) {
            None => PolyScalar::zero(self.dim),
            Some((sorted, odd)) => {
                let p = self.comps.get(&sorted).cloned().unwrap_or_else(|| PolyScalar::zero(self.dim));
                if odd {
                    -p
                } else {
                    p
                }
            }
        }
    }

    /// `i`-th coefficient of a degree-1 tensor.
    pub fn coeff(&self, i: usize) -> PolyScalar {
        debug_assert_eq!(self.degree, 1);
        self.component(&[i])
    }

    pub fn to_vec(&self) -> Vec<PolyScalar> {
        (0..self.dim).map(|i| self.coeff(i)).collect()
    }

    /// The degree-0 value as a scalar.
    pub fn as_scalar(&self) -> PolyScalar {
        debug_assert_eq!(self.degree, 0);
        self.component(&[])
    }

    pub fn neg(&self) -> Self {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn mul_scalar(&self, f: &PolyScalar) -> Self {
        self.map(|p| p * f)
    }

    pub fn map(&self, f: impl Fn(&PolyScalar) -> PolyScalar) -> Self {
        let mut t = Self::zero(self.dim, self.degree);
        for (idx, p) in &self.comps {
            t.insert(idx, f(p));
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut t = self.clone();
        for (idx, p) in &other.comps {
            t.insert(idx, p.clone());
        }
        t
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "tensors live on different charts");
        assert_eq!(self.degree, other.degree, "tensors have different degrees");
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "tensors live on different charts");
        let mut t = Self::zero(self.dim, self.degree + other.degree);
        if t.degree > t.dim {
            return t;
        }
        for (i, p) in &self.comps {
            for (j, q) in &other.comps {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                t.insert(&idx, p * q);
            }
        }
        t
    }

    pub fn evaluate_at(&self, point: &[f64]) -> NumericTensor {
        assert_eq!(point.len(), self.dim);
        NumericTensor {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|(k, p)| (k.clone(), p.eval(point))).collect(),
        }
    }

    pub fn evaluate_exact(&self, point: &[Rational]) -> BTreeMap<Vec<usize>, Rational> {
        self.comps
            .iter()
            .map(|(k, p)| (k.clone(), p.eval_exact(point)))
            .filter(|(_, v)| !num_traits::Zero::is_zero(v))
            .collect()
    }

    /// Contraction of a degree-1 tensor of the opposite kind into the first slot.
    fn contract_first<L: Kind>(&self, v: &Alternating<L>) -> Self {
        assert_eq!(v.degree, 1, "contraction needs a degree-1 argument");
        assert_eq!(self.dim, v.dim, "tensors live on different charts");
        assert!(self.degree >= 1);
        let mut t = Self::zero(self.dim, self.degree - 1);
        for (idx, p) in &self.comps {
            for r in 0..idx.len() {
                let Some(vr) = v.comps.get(&vec![idx[r]]) else { continue };
                let mut rest = idx.clone();
                rest.remove(r);
                let term = p * vr;
                t.insert(&rest, if r % 2 == 1 { -term } else { term });
            }
        }
        t
    }
}

impl PolyKVector {
    /// `X(f) = Σ Xⁱ ∂ᵢ f` for a vector field.
    pub fn apply(&self, f: &PolyScalar) -> PolyScalar {
        assert_eq!(self.degree, 1);
        let mut out = PolyScalar::zero(self.dim);
        for (idx, p) in &self.comps {
            out += &(p * &f.derivative(idx[0]));
        }
        out
    }

    /// Lie bracket `[X, Y]` of vector fields.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.degree, 1);
        assert_eq!(other.degree, 1);
        let comps = (0..self.dim).map(|l| (vec![l], &self.apply(&other.coeff(l)) - &other.apply(&self.coeff(l))));
        Self::from_components(self.dim, 1, comps)
    }

    /// `π(μ, ·, …)`: contraction of a 1-form into the first slot.
    pub fn contract(&self, mu: &PolyKForm) -> Self {
        self.contract_first(mu)
    }

    /// `L_X P` as the derivation extension of `[X, ·]`.
    pub fn lie_derivative(&self, x: &PolyKVector) -> Self {
        assert_eq!(x.degree, 1);
        assert_eq!(self.dim, x.dim, "tensors live on different charts");
        let mut t = Self::zero(self.dim, self.degree);
        // [X, ∂_j] = −Σ_l (∂_j X^l) ∂_l
        let dx: Vec<Vec<PolyScalar>> = (0..self.dim)
            .map(|j| (0..self.dim).map(|l| x.coeff(l).derivative(j)).collect())
            .collect();
        for (idx, p) in &self.comps {
            t.insert(idx, x.apply(p));
            for r in 0..idx.len() {
                for (l, dl) in dx[idx[r]].iter().enumerate() {
                    if dl.is_zero() {
                        continue;
                    }
                    let mut j = idx.clone();
                    j[r] = l;
                    t.insert(&j, -(p * dl));
                }
            }
        }
        t
    }
}

impl PolyKForm {
    /// `df` for a scalar.
    pub fn differential(f: &PolyScalar) -> Self {
        Self::scalar(f.clone()).d()
    }

    pub fn d(&self) -> Self {
        let mut t = Self::zero(self.dim, self.degree + 1);
        if t.degree > t.dim {
            return t;
        }
        for (idx, p) in &self.comps {
            for j in 0..self.dim {
                let dp = p.derivative(j);
                if dp.is_zero() {
                    continue;
                }
                let mut k = Vec::with_capacity(idx.len() + 1);
                k.push(j);
                k.extend_from_slice(idx);
                t.insert(&k, dp);
            }
        }
        t
    }

    /// `ι_X α` into the first slot.
    pub fn interior(&self, x: &PolyKVector) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        if x.degree != 1 {
            return Err(Error::Degree(format!("interior product by a {}-vector", x.degree)));
        }
        check_dim(self.dim, x.dim)?;
        Ok(self.contract_first(x))
    }

    /// Cartan formula `L_X = d ι_X + ι_X d`.
    pub fn lie_derivative(&self, x: &PolyKVector) -> Self {
        assert_eq!(self.dim, x.dim, "tensors live on different charts");
        let d_then_i = self.d().contract_first(x);
        if self.degree == 0 {
            return d_then_i;
        }
        self.contract_first(x).d().add(&d_then_i)
    }

    /// Value on a vector field of a 1-form.
    pub fn on_vector(&self, x: &PolyKVector) -> PolyScalar {
        assert_eq!(self.degree, 1);
        self.contract_first(x).as_scalar()
    }

    /// `φ*α` for `α` on φ's target.
    pub fn pullback(&self, phi: &PolyMap) -> Result<Self> {
        check_dim(phi.target_dim(), self.dim)?;
        let n = phi.source_dim();
        let dphi: Vec<PolyKForm> = phi.components().iter().map(Self::differential).collect();
        let mut t = Self::zero(n, self.degree);
        if self.degree > n {
            return Ok(t);
        }
        for (idx, p) in &self.comps {
            let mut acc = Self::scalar(p.compose(phi.components()));
            for &i in idx {
                acc = acc.wedge(&dphi[i]);
            }
            t = t.add(&acc);
        }
        Ok(t)
    }
}

/// `d α`.
pub fn exterior_derivative(alpha: &PolyKForm) -> PolyKForm {
    alpha.d()
}

/// `ι_X α`.
pub fn interior_product(x: &PolyKVector, alpha: &PolyKForm) -> Result<PolyKForm> {
    alpha.interior(x)
}

pub fn pullback_form(phi: &PolyMap, alpha: &PolyKForm) -> Result<PolyKForm> {
    alpha.pullback(phi)
}

pub fn evaluate_at<K: Kind>(t: &Alternating<K>, point: &[f64]) -> NumericTensor {
    t.evaluate_at(point)
}

/// Float evaluation of an alternating tensor at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericTensor {
    pub dim: usize,
    pub degree: usize,
    pub comps: BTreeMap<Vec<usize>, f64>,
}

impl NumericTensor {
    pub fn component(&self, idx: &[usize]) -> f64 {
        match sort_with_sign(idx) {
            None => 0.0,
            Some((k, odd)) => {
                let v = self.comps.get(&k).copied().unwrap_or(0.0);
                if odd {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        assert_eq!(self.degree, 1);
        DVector::from_fn(self.dim, |i, _| self.component(&[i]))
    }

    /// Full antisymmetric matrix `M_{ij} = T(i, j)` of a degree-2 tensor.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.degree, 2);
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.component(&[i, j]))
    }
}
