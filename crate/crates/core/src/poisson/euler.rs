//! Linearization of Euler-like vector fields at a fixed point.
//!
//! For `X = ℰ + Z` with `Z` vanishing to second order, the family
//! `Z_t(x) = t⁻² Z(tx)` is polynomial in `(x, t)` (a degree-`k` term picks up
//! `t^{k−2}`), and integrating it from `t = 0` to `1` gives `φ₁` with
//! `(φ₁)_* X = ℰ`.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::fields::{rat, CompiledField, NumPoly, PolyKVector, PolyScalar};
use crate::numeric::linalg::max_abs;
use crate::numeric::ode::integrate_variational;
use crate::report::ResidualReport;

#[derive(Clone, Debug, Serialize)]
pub struct EulerReport {
    pub residual: ResidualReport,
    /// `φ₁(x)` for each sample, in input order.
    pub images: Vec<Vec<f64>>,
}

/// `Z_t` with its spatial jacobian, evaluated at `(x, t)`.
struct TimeField {
    n: usize,
    comps: Vec<NumPoly>,
    jac: Vec<Vec<NumPoly>>,
}

impl TimeField {
    fn eval(&self, x: &[f64], t: f64) -> (DVector<f64>, DMatrix<f64>) {
        let mut xt = x.to_vec();
        xt.push(t);
        let v = DVector::from_fn(self.n, |i, _| self.comps[i].eval(&xt));
        let j = DMatrix::from_fn(self.n, self.n, |i, k| self.jac[i][k].eval(&xt));
        (v, j)
    }
}

fn check_euler_like(x: &PolyKVector) -> Result<()> {
    let n = x.dim();
    let mut bad = Vec::new();
    for i in 0..n {
        let c = x.coeff(i);
        if !c.coefficient(&vec![0; n]).is_zero() {
            bad.push(format!("component {} does not vanish at 0", i + 1));
        }
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            let want = if i == j { rat(1) } else { rat(0) };
            if c.coefficient(&e) != want {
                bad.push(format!("linear part differs from the Euler field at ({}, {})", i + 1, j + 1));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(bad.join("; ")))
    }
}

/// Builds `φ₁` at each sample and reports `‖Dφ₁(x)·X(x) − φ₁(x)‖_max`.
///
/// `φ₁ = Ψ₁⁻¹` for the forward flow `Ψ` of `ż = Z_t(z)`, computed by
/// integrating `u' = −Z_{1−τ}(u)` for `τ ∈ [0, 1]` with RK4 step `step`.
pub fn euler_linearize(x: &PolyKVector, samples: &[Vec<f64>], step: f64) -> Result<EulerReport> {
    if x.degree() != 1 {
        return Err(Error::Degree("expected a vector field".into()));
    }
    check_euler_like(x)?;
    let n = x.dim();
    for s in samples {
        check_dim(n, s.len())?;
    }
    let zt: Vec<PolyScalar> = (0..n)
        .map(|i| {
            let mut out = PolyScalar::zero(n + 1);
            for (m, c) in x.coeff(i).terms() {
                let k = m.degree();
                if k < 2 {
                    continue;
                }
                let mut e = m.exps().to_vec();
                e.push(k - 2);
                out += &PolyScalar::monomial(e, c.clone());
            }
            out
        })
        .collect();
    let field = TimeField {
        n,
        comps: zt.iter().map(PolyScalar::compile).collect(),
        jac: zt.iter().map(|z| (0..n).map(|k| z.derivative(k).compile()).collect()).collect(),
    };
    let xf = CompiledField::new(x);

    let results: Vec<Result<(Vec<f64>, Vec<f64>, f64)>> = samples
        .par_iter()
        .map(|x0| {
            let rhs = |tau: f64, u: &DVector<f64>| {
                let (v, j) = field.eval(u.as_slice(), 1.0 - tau);
                (-v, -j)
            };
            let end = integrate_variational(rhs, 0.0, &DVector::from_column_slice(x0), &[1.0], step, |_| true)
                .map_err(|e| Error::DomainEscape {
                    start: x0.clone(),
                    time: e.time,
                })?
                .pop()
                .unwrap();
            let pushed = &end.jacobian * xf.eval(x0);
            let r = max_abs(&DMatrix::from_column_slice(n, 1, (pushed - &end.state).as_slice()));
            Ok((x0.clone(), end.state.iter().copied().collect(), r))
        })
        .collect();
    let mut residual = ResidualReport::empty();
    let mut images = Vec::with_capacity(samples.len());
    for r in results {
        let (p, img, v) = r?;
        residual.push(p, v);
        images.push(img);
    }
    Ok(EulerReport { residual, images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ode::integrate;

    fn var(n: usize, i: usize) -> PolyScalar {
        PolyScalar::var(n, i)
    }

    fn euler(n: usize) -> PolyKVector {
        PolyKVector::from_vec((0..n).map(|i| var(n, i)).collect())
    }

    fn ball_samples(r: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for k in 0..12 {
            let a = k as f64 * std::f64::consts::TAU / 12.0;
            for s in [0.3, 0.7, 1.0] {
                out.push(vec![r * s * a.cos(), r * s * a.sin()]);
            }
        }
        out
    }

    /// Conjugation oracle: if `(φ)_*X = ℰ` then `φ(flow_X^t(x)) = e^{−t}φ(x)`
    /// under the `ẋ = −X` flow convention.
    fn conjugation_defect(x: &PolyKVector, report: &EulerReport, samples: &[Vec<f64>]) -> f64 {
        let f = CompiledField::new(x);
        let t = 0.3;
        let mut worst: f64 = 0.0;
        for (x0, img) in samples.iter().zip(&report.images) {
            let moved = integrate(|_, u| -f.eval(u.as_slice()), 0.0, &DVector::from_column_slice(x0), t, 1e-3);
            let again = euler_linearize(x, &[moved.iter().copied().collect()], 1e-3).unwrap();
            for (a, b) in again.images[0].iter().zip(img) {
                worst = worst.max((a - (-t).exp() * b).abs());
            }
        }
        worst
    }

    #[test]
    fn euler_field_is_its_own_linearization() {
        let s = ball_samples(0.3);
        let r = euler_linearize(&euler(2), &s, 1e-3).unwrap();
        assert_eq!(r.residual.max_residual, 0.0);
        assert_eq!(r.images, s);
    }

    #[test]
    fn one_dimensional_closed_form() {
        // X = x + x² linearizes through φ₁(x) = x / (1 + x)
        let x = PolyKVector::from_vec(vec![&var(1, 0) + &var(1, 0).pow(2)]);
        let pts: Vec<Vec<f64>> = [-0.3, -0.1, 0.2, 0.3].iter().map(|&v| vec![v]).collect();
        let r = euler_linearize(&x, &pts, 1e-3).unwrap();
        for (p, img) in pts.iter().zip(&r.images) {
            assert!((img[0] - p[0] / (1.0 + p[0])).abs() < 1e-10);
        }
        assert!(r.residual.max_residual < 1e-8);
    }

    #[test]
    fn quadratic_perturbations() {
        let s = ball_samples(0.3);
        let xx = var(2, 0).pow(2);
        let xy = &var(2, 0) * &var(2, 1);
        for z in [vec![xx.clone(), PolyScalar::zero(2)], vec![xy, xx]] {
            let x = euler(2).add(&PolyKVector::from_vec(z));
            let r = euler_linearize(&x, &s, 1e-3).unwrap();
            assert!(r.residual.max_residual < 1e-5, "{:?}", r.residual);
            assert!(conjugation_defect(&x, &r, &s[..6]) < 1e-5);
        }
    }

    #[test]
    fn non_euler_linear_part_is_rejected() {
        let x = PolyKVector::from_vec(vec![var(2, 0).scale(&rat(2)), var(2, 1)]);
        assert!(matches!(euler_linearize(&x, &[], 1e-3), Err(Error::Precondition(_))));
        let shifted = euler(2).add(&PolyKVector::from_vec(vec![PolyScalar::one(2), PolyScalar::zero(2)]));
        assert!(matches!(euler_linearize(&shifted, &[], 1e-3), Err(Error::Precondition(_))));
    }
}
