//! Exact polynomial exterior calculus on coordinate charts ℝⁿ.
//!
//! Coefficients are exact rationals, so identities such as `d∘d = 0` or the
//! vanishing of a Jacobiator are decided by structural equality. Floats only
//! appear at evaluation boundaries. There is no degree cap; memory use grows
//! with the number of monomials and is the caller's concern.

mod alternating;
pub mod json;
mod map;
mod poly;
pub mod random;

pub use alternating::{
    evaluate_at, exterior_derivative, interior_product, pullback_form, sort_with_sign, Alternating, FormKind, Kind,
    NumericTensor, PolyKForm, PolyKVector, VectorKind,
};
pub use map::{pushforward_vector_at_point, CallbackMap, Chart, CompiledMap, PolyMap, SmoothMap};
pub use poly::{rat, rat_to_f64, ratio, Monomial, NumPoly, PolyScalar, Rational};

/// Vector fields are degree-1 multivectors.
pub type PolyVector = PolyKVector;
/// 1-forms.
pub type PolyOneForm = PolyKForm;
/// 2-forms.
pub type PolyTwoForm = PolyKForm;

/// Float copy of a vector field with its jacobian, for integrators.
#[derive(Clone, Debug)]
pub struct CompiledField {
    comps: Vec<NumPoly>,
    jac: Vec<Vec<NumPoly>>,
}

impl CompiledField {
    pub fn new(x: &PolyKVector) -> Self {
        assert_eq!(x.degree(), 1);
        let n = x.dim();
        let comps: Vec<PolyScalar> = x.to_vec();
        CompiledField {
            jac: comps
                .iter()
                .map(|c| (0..n).map(|j| c.derivative(j).compile()).collect())
                .collect(),
            comps: comps.iter().map(PolyScalar::compile).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval(&self, x: &[f64]) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_iterator(self.comps.len(), self.comps.iter().map(|c| c.eval(x)))
    }

    pub fn jacobian(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let n = self.comps.len();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.jac[i][j].eval(x))
    }
}

/// `L_X T` for forms and multivectors alike.
pub trait LieDerivative {
    fn lie_derivative_by(&self, x: &PolyKVector) -> Self;
}

impl LieDerivative for PolyKForm {
    fn lie_derivative_by(&self, x: &PolyKVector) -> Self {
        self.lie_derivative(x)
    }
}

impl LieDerivative for PolyKVector {
    fn lie_derivative_by(&self, x: &PolyKVector) -> Self {
        self.lie_derivative(x)
    }
}

pub fn lie_derivative<T: LieDerivative>(x: &PolyKVector, t: &T) -> T {
    t.lie_derivative_by(x)
}

pub fn wedge<K: Kind>(a: &Alternating<K>, b: &Alternating<K>) -> Alternating<K> {
    a.wedge(b)
}
