//! Moser's argument for gauge-equivalent Poisson structures, as a numeric verifier.
//!
//! Given `a_t`, set `ω_t = −∫₀ᵗ d a_s ds`, `π_t = π₀^{ω_t}` and
//! `X_t = π_t♯(a_t)`. The flow `Φ_t` of the time-dependent field satisfies
//! `(Φ_t)_* π_t = π₀`, which is what gets sampled.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::PoissonBivector;
use crate::dirac::gauge_matrix;
use crate::error::{check_dim, Error, Result};
use crate::fields::{NumPoly, PolyKForm};
use crate::numeric::fd;
use crate::numeric::linalg::max_abs;
use crate::numeric::ode::integrate_variational;
use crate::report::ResidualReport;

/// A family of `k`-forms on ℝⁿ depending polynomially on `t`, stored as a
/// form on ℝⁿ⁺¹ with `t` as the last coordinate and no `dt` components.
#[derive(Clone, Debug, PartialEq)]
pub struct FormFamily {
    dim: usize,
    form: PolyKForm,
}

impl FormFamily {
    pub fn new(dim: usize, form: PolyKForm) -> Result<Self> {
        check_dim(dim + 1, form.dim())?;
        if form.components().any(|(idx, _)| idx.contains(&dim)) {
            return Err(Error::Invalid("a form family may not have dt components".into()));
        }
        Ok(FormFamily { dim, form })
    }

    /// A family that does not depend on time.
    pub fn constant(form: &PolyKForm) -> Self {
        let dim = form.dim();
        let comps = form.components().map(|(i, p)| (i.clone(), p.embed(dim + 1, 0)));
        FormFamily {
            dim,
            form: PolyKForm::from_components(dim + 1, form.degree(), comps),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    pub fn as_form(&self) -> &PolyKForm {
        &self.form
    }

    /// Spatial exterior derivative `d_x`.
    pub fn d(&self) -> FormFamily {
        let full = self.form.d();
        let t = self.dim;
        let comps = full.components().filter(|(idx, _)| !idx.contains(&t)).map(|(i, p)| (i.clone(), p.clone()));
        FormFamily {
            dim: self.dim,
            form: PolyKForm::from_components(t + 1, full.degree(), comps),
        }
    }

    /// `∫₀ᵗ (·) ds`, componentwise and exact.
    pub fn integrate_in_time(&self) -> FormFamily {
        let t = self.dim;
        FormFamily {
            dim: self.dim,
            form: self.form.map(|p| p.integrate_var(t)),
        }
    }

    pub fn neg(&self) -> FormFamily {
        FormFamily {
            dim: self.dim,
            form: self.form.neg(),
        }
    }
}

/// Compiled components of a family, evaluated at `(x, t)`.
struct CompiledFamily {
    dim: usize,
    comps: Vec<(Vec<usize>, NumPoly)>,
}

impl CompiledFamily {
    fn new(f: &FormFamily) -> Self {
        CompiledFamily {
            dim: f.dim,
            comps: f.form.components().map(|(i, p)| (i.clone(), p.compile())).collect(),
        }
    }

    fn at(&self, x: &[f64], t: f64) -> Vec<f64> {
        let mut xt = x.to_vec();
        xt.push(t);
        let mut out = Vec::with_capacity(self.comps.len());
        for (_, p) in &self.comps {
            out.push(p.eval(&xt));
        }
        out
    }

    fn vector(&self, x: &[f64], t: f64) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        for ((idx, _), val) in self.comps.iter().zip(self.at(x, t)) {
            v[idx[0]] = val;
        }
        v
    }

    /// `Ω_{ij} = ω(e_i, e_j)`.
    fn matrix(&self, x: &[f64], t: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for ((idx, _), val) in self.comps.iter().zip(self.at(x, t)) {
            m[(idx[0], idx[1])] = val;
            m[(idx[1], idx[0])] = -val;
        }
        m
    }
}

/// Samples `‖J Π_T(x) Jᵀ − Π₀(Φ_T(x))‖_max` over `grid`, where `J = DΦ_T(x)`.
///
/// `Φ_T = Ψ_T⁻¹` for the forward flow `Ψ` of `ż = X_t(z)`; this is computed
/// by integrating `u' = −X_{T−τ}(u)` from `τ = 0` to `T`, which reduces to
/// `ẋ = −X` for autonomous fields.
pub fn moser_verify(
    pi0: &PoissonBivector,
    a: &FormFamily,
    t_final: f64,
    grid: &[Vec<f64>],
    step: f64,
) -> Result<ResidualReport> {
    let n = pi0.dim();
    check_dim(n, a.dim())?;
    if a.degree() != 1 {
        return Err(Error::Degree("a_t must be a family of 1-forms".into()));
    }
    for x in grid {
        check_dim(n, x.len())?;
    }
    let omega = CompiledFamily::new(&a.d().integrate_in_time().neg());
    let a_num = CompiledFamily::new(a);
    let pi_t = |x: &[f64], t: f64| gauge_matrix(&pi0.matrix_at(x), &omega.matrix(x, t), x);
    let field = |x: &[f64], t: f64| -> Result<DVector<f64>> { Ok(pi_t(x, t)?.transpose() * a_num.vector(x, t)) };

    let results: Vec<Result<(Vec<f64>, f64)>> = grid
        .par_iter()
        .map(|x0| {
            // Check transversality along the way; the field closure below cannot return errors.
            let failure = std::sync::Mutex::new(None);
            let rhs = |tau: f64, u: &DVector<f64>| {
                let s = t_final - tau;
                let f = |y: &[f64]| match field(y, s) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e);
                        DVector::from_element(n, f64::NAN)
                    }
                };
                let v = -f(u.as_slice());
                let j = -fd::jacobian(f, u.as_slice(), fd::STEP);
                (v, j)
            };
            let flow = integrate_variational(rhs, 0.0, &DVector::from_column_slice(x0), &[t_final], step, |_| true);
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(e);
            }
            let end = flow
                .map_err(|e| Error::DomainEscape {
                    start: x0.clone(),
                    time: e.time,
                })?
                .pop()
                .unwrap();
            let j = &end.jacobian;
            let pushed = j * pi_t(x0, t_final)? * j.transpose();
            let target = pi0.matrix_at(end.state.as_slice());
            Ok((x0.clone(), max_abs(&(pushed - target))))
        })
        .collect();
    let mut report = ResidualReport::empty();
    for r in results {
        let (p, v) = r?;
        report.push(p, v);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PolyKVector, PolyScalar};

    fn grid(radius: f64, k: usize) -> Vec<Vec<f64>> {
        let mut g = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let s = |i: usize| -radius + 2.0 * radius * i as f64 / (k - 1) as f64;
                g.push(vec![s(i), s(j)]);
            }
        }
        g
    }

    fn minus_x_dy() -> FormFamily {
        let a = PolyKForm::from_components(3, 1, [(vec![1], -PolyScalar::var(3, 0))]);
        FormFamily::new(2, a).unwrap()
    }

    #[test]
    fn gauge_family_for_minus_x_dy() {
        let w = minus_x_dy().d().integrate_in_time().neg();
        // ω_t = t dx∧dy
        assert_eq!(w.as_form().component(&[0, 1]), PolyScalar::var(3, 2));
    }

    #[test]
    fn zero_family_is_identity() {
        let pi = PoissonBivector::standard_symplectic(1);
        let a = FormFamily::new(2, PolyKForm::zero(3, 1)).unwrap();
        let r = moser_verify(&pi, &a, 0.5, &grid(1.0, 3), 1e-3).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn constant_example_within_tolerance() {
        let pi = PoissonBivector::standard_symplectic(1);
        for t in [-0.5, 0.25, 0.5] {
            let r = moser_verify(&pi, &minus_x_dy(), t, &grid(1.0, 5), 1e-3).unwrap();
            assert!(r.max_residual < 1e-6, "T = {t}: {r:?}");
        }
    }

    #[test]
    fn transversality_failure_names_the_point() {
        let pi = PoissonBivector::standard_symplectic(1);
        match moser_verify(&pi, &minus_x_dy(), 1.0, &[vec![0.5, 0.0]], 1e-2) {
            Err(Error::Transversality { .. }) => {}
            other => panic!("expected a transversality error, got {other:?}"),
        }
    }

    #[test]
    fn hamiltonian_family() {
        // a_t = d(x²y): ω_t = 0, so X_t is the Hamiltonian field of x²y for π = (1 + x²)∂x∧∂y.
        let pi = PoissonBivector::new(PolyKVector::from_components(
            2,
            2,
            [(vec![0, 1], &PolyScalar::one(2) + &PolyScalar::var(2, 0).pow(2))],
        ))
        .unwrap();
        let f = &PolyScalar::var(2, 0).pow(2) * &PolyScalar::var(2, 1);
        let a = FormFamily::constant(&PolyKForm::differential(&f));
        let r = moser_verify(&pi, &a, 0.5, &grid(0.5, 4), 1e-3).unwrap();
        assert!(r.max_residual < 1e-8, "{r:?}");
    }

    #[test]
    fn non_commuting_family() {
        // a_t = −x dy + t x dx gives ω_t = t dx∧dy and a field that varies in time.
        let t = PolyScalar::var(3, 2);
        let x = PolyScalar::var(3, 0);
        let a = PolyKForm::from_components(3, 1, [(vec![1], -x.clone()), (vec![0], &t * &x)]);
        let pi = PoissonBivector::standard_symplectic(1);
        let r = moser_verify(&pi, &FormFamily::new(2, a).unwrap(), 0.5, &grid(0.8, 4), 1e-3).unwrap();
        assert!(r.max_residual < 1e-6, "{r:?}");
    }
}
