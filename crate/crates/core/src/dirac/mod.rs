//! The generalized tangent bundle `TM ⊕ T*M`.
//!
//! Numeric fibers are `2n`-vectors `(v, μ)` with the vector part first. The
//! pairing is `⟨v₁+μ₁, v₂+μ₂⟩ = μ₁(v₂) + μ₂(v₁)` and the bracket is the
//! Dorfman bracket `⟦X₁+α₁, X₂+α₂⟧ = [X₁,X₂] + L_{X₁}α₂ − ι_{X₂}dα₁`.
//! Matrix conventions: `π♯μ = Πᵀμ`, `ω♭v = Ωᵀv`.

mod frame;
mod gauge;
mod maps;
mod pullback;

use nalgebra::DVector;

pub use frame::{
    graph_of_form, graph_of_poisson, integrability_tensor, integrability_tensor_exact, FrameJson, LagrangianFrame,
    SectionJson, Tensor3,
};
pub use gauge::{
    gauge_matrix, gauge_poisson, gauge_poisson_symbolic, gauge_section, gauge_transform_fiber, GaugeTransform,
};
pub use maps::{check_poisson_map, check_poisson_map_numeric, poisson_map_defects, MapSign};
pub use pullback::{cosymplectic_check, pullback_dirac_at_point, pullback_dirac_fiber, CosymplecticReport};

use crate::error::{check_dim, Error, Result};
use crate::fields::{PolyKForm, PolyKVector, PolyScalar};
use crate::poisson::PoissonBivector;

/// `X + α` with `X` a vector field and `α` a 1-form on the same chart.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedSection {
    x: PolyKVector,
    alpha: PolyKForm,
}

impl GeneralizedSection {
    pub fn new(x: PolyKVector, alpha: PolyKForm) -> Result<Self> {
        if x.degree() != 1 || alpha.degree() != 1 {
            return Err(Error::Degree("a section needs a vector field and a 1-form".into()));
        }
        check_dim(x.dim(), alpha.dim())?;
        Ok(GeneralizedSection { x, alpha })
    }

    pub fn vector(x: PolyKVector) -> Self {
        let n = x.dim();
        Self::new(x, PolyKForm::zero(n, 1)).unwrap()
    }

    pub fn form(alpha: PolyKForm) -> Self {
        let n = alpha.dim();
        Self::new(PolyKVector::zero(n, 1), alpha).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// The anchor `a(X + α) = X`.
    pub fn anchor(&self) -> &PolyKVector {
        &self.x
    }

    pub fn form_part(&self) -> &PolyKForm {
        &self.alpha
    }

    pub fn add(&self, other: &Self) -> Self {
        GeneralizedSection {
            x: self.x.add(&other.x),
            alpha: self.alpha.add(&other.alpha),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        GeneralizedSection {
            x: self.x.sub(&other.x),
            alpha: self.alpha.sub(&other.alpha),
        }
    }

    pub fn mul_scalar(&self, f: &PolyScalar) -> Self {
        GeneralizedSection {
            x: self.x.mul_scalar(f),
            alpha: self.alpha.mul_scalar(f),
        }
    }

    pub fn eval(&self, point: &[f64]) -> DVector<f64> {
        let n = self.dim();
        let v = self.x.evaluate_at(point).to_vector();
        let a = self.alpha.evaluate_at(point).to_vector();
        DVector::from_fn(2 * n, |i, _| if i < n { v[i] } else { a[i - n] })
    }
}

pub fn pairing(s1: &GeneralizedSection, s2: &GeneralizedSection) -> Result<PolyScalar> {
    check_dim(s1.dim(), s2.dim())?;
    Ok(&s1.alpha.on_vector(&s2.x) + &s2.alpha.on_vector(&s1.x))
}

pub fn courant_bracket(s1: &GeneralizedSection, s2: &GeneralizedSection) -> Result<GeneralizedSection> {
    check_dim(s1.dim(), s2.dim())?;
    let x = s1.x.bracket(&s2.x);
    let alpha = s2.alpha.lie_derivative(&s1.x).sub(&s1.alpha.d().interior(&s2.x)?);
    GeneralizedSection::new(x, alpha)
}

/// `[α, β]_π = L_{π♯α}β − ι_{π♯β}dα`.
pub fn one_form_bracket(pi: &PoissonBivector, alpha: &PolyKForm, beta: &PolyKForm) -> PolyKForm {
    pi.form_bracket(alpha, beta)
}
