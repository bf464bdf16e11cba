//! Gauge transformations `R_ω(v + μ) = v + μ + ι_v ω` by closed 2-forms.

use nalgebra::DMatrix;
use num_traits::Zero;

use super::frame::LagrangianFrame;
use super::GeneralizedSection;
use crate::error::{check_dim, Error, Result};
use crate::fields::{PolyKForm, PolyKVector, PolyScalar};
use crate::numeric::linalg::{rank, RANK_TOL};
use crate::poisson::PoissonBivector;

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeTransform {
    omega: PolyKForm,
}

impl GaugeTransform {
    pub fn new(omega: PolyKForm) -> Result<Self> {
        if omega.degree() != 2 {
            return Err(Error::Degree("gauge transformations use 2-forms".into()));
        }
        if !omega.d().is_zero() {
            return Err(Error::NotClosed);
        }
        Ok(GaugeTransform { omega })
    }

    pub fn form(&self) -> &PolyKForm {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// `Ω_{ij} = ω(e_i, e_j)`.
    pub fn matrix_at(&self, point: &[f64]) -> DMatrix<f64> {
        self.omega.evaluate_at(point).to_matrix()
    }

    pub fn apply(&self, s: &GeneralizedSection) -> Result<GeneralizedSection> {
        gauge_section(&self.omega, s)
    }
}

/// `X + α ↦ X + α + ι_X ω` for any 2-form; closedness is what makes this
/// bracket-preserving, so callers outside tests should go through [`GaugeTransform`].
pub fn gauge_section(omega: &PolyKForm, s: &GeneralizedSection) -> Result<GeneralizedSection> {
    check_dim(omega.dim(), s.dim())?;
    GeneralizedSection::new(s.anchor().clone(), s.form_part().add(&omega.interior(s.anchor())?))
}

/// `R_ω` on the fiber at `point`: `(v, μ) ↦ (v, μ + Ωᵀv)`.
pub fn gauge_transform_fiber(e: &LagrangianFrame, omega: &GaugeTransform, point: &[f64]) -> Result<LagrangianFrame> {
    check_dim(e.dim(), omega.dim())?;
    let n = e.dim();
    let mut m = e.fiber(point)?;
    let shift = omega.matrix_at(point).transpose() * m.rows(0, n);
    let mut forms = m.rows_mut(n, n);
    forms += shift;
    LagrangianFrame::pointwise(point.to_vec(), m)
}

/// `Π^ω = (I + ΠΩ)⁻¹ Π`, the matrix of `π♯(I + ω♭π♯)⁻¹`.
///
/// Fails when `Gr(π)^ω` is not transverse to `TM`, judged by the smallest
/// singular value of `I + ΠΩ` against `1e-10` times the largest.
pub fn gauge_matrix(pi: &DMatrix<f64>, omega: &DMatrix<f64>, point: &[f64]) -> Result<DMatrix<f64>> {
    let n = pi.nrows();
    let m = DMatrix::identity(n, n) + pi * omega;
    if rank(&m, RANK_TOL) < n {
        return Err(Error::Transversality {
            point: point.to_vec(),
            detail: "I + ω♭π♯ is singular, so the gauge-transformed graph meets TM".into(),
        });
    }
    m.lu()
        .solve(pi)
        .ok_or_else(|| Error::Transversality {
            point: point.to_vec(),
            detail: "I + ω♭π♯ is singular".into(),
        })
}

pub fn gauge_poisson(pi: &PoissonBivector, omega: &GaugeTransform, point: &[f64]) -> Result<DMatrix<f64>> {
    check_dim(pi.dim(), omega.dim())?;
    check_dim(pi.dim(), point.len())?;
    gauge_matrix(&pi.matrix_at(point), &omega.matrix_at(point), point)
}

fn poly_det(m: &[Vec<PolyScalar>]) -> PolyScalar {
    let n = m.len();
    if n == 0 {
        return PolyScalar::one(0);
    }
    let nv = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = PolyScalar::zero(nv);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor = minor(m, 0, j);
        let term = &m[0][j] * &poly_det(&minor);
        if j % 2 == 0 {
            out += &term;
        } else {
            out -= &term;
        }
    }
    out
}

fn minor(m: &[Vec<PolyScalar>], r: usize, c: usize) -> Vec<Vec<PolyScalar>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, v)| v.clone()).collect())
        .collect()
}

/// Symbolic `π^ω`, available only when `det(I + ΠΩ)` is a nonzero constant
/// (otherwise the inverse leaves the polynomial class).
pub fn gauge_poisson_symbolic(pi: &PoissonBivector, omega: &GaugeTransform) -> Result<PoissonBivector> {
    let n = pi.dim();
    check_dim(n, omega.dim())?;
    let p: Vec<Vec<PolyScalar>> = (0..n).map(|i| (0..n).map(|j| pi.entry(i, j)).collect()).collect();
    let o: Vec<Vec<PolyScalar>> = (0..n)
        .map(|i| (0..n).map(|j| omega.form().component(&[i, j])).collect())
        .collect();
    let m: Vec<Vec<PolyScalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = if i == j { PolyScalar::one(n) } else { PolyScalar::zero(n) };
                    for k in 0..n {
                        v += &(&p[i][k] * &o[k][j]);
                    }
                    v
                })
                .collect()
        })
        .collect();
    let det = poly_det(&m);
    let det = match det.as_constant() {
        Some(c) if !c.is_zero() => c,
        _ => {
            return Err(Error::Precondition(format!(
                "det(I + ω♭π♯) = {det} is not a nonzero constant"
            )))
        }
    };
    // (I + ΠΩ)⁻¹ = adj / det
    let inv_det = det.recip();
    let adj: Vec<Vec<PolyScalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = poly_det(&minor(&m, j, i));
                    let c = if (i + j) % 2 == 0 { c } else { -c };
                    c.scale(&inv_det)
                })
                .collect()
        })
        .collect();
    let mut out = PolyKVector::zero(n, 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut v = PolyScalar::zero(n);
            for k in 0..n {
                v += &(&adj[i][k] * &p[k][j]);
            }
            out.insert(&[i, j], v);
        }
    }
    PoissonBivector::new(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::dirac::frame::gram;
    use crate::dirac::{courant_bracket, graph_of_poisson};
    use crate::fields::random::RandomPoly;
    use crate::fields::{rat, ratio};
    use crate::numeric::linalg::max_abs;

    fn c_dxdy(c: crate::fields::Rational) -> GaugeTransform {
        GaugeTransform::new(PolyKForm::from_components(2, 2, [(vec![0, 1], PolyScalar::constant(2, c))])).unwrap()
    }

    #[test]
    fn constant_gauge_law() {
        let pi = PoissonBivector::standard_symplectic(1);
        for (c, cf) in [(ratio(1, 2), 0.5), (rat(3), 3.0), (ratio(-2, 7), -2.0 / 7.0), (rat(0), 0.0)] {
            let g = gauge_poisson(&pi, &c_dxdy(c.clone()), &[0.4, -1.0]).unwrap();
            let expected = pi.matrix_at(&[0.0, 0.0]) / (1.0 - cf);
            assert!(max_abs(&(g - expected)) < 1e-12);
            let sym = gauge_poisson_symbolic(&pi, &c_dxdy(c.clone())).unwrap();
            assert_eq!(sym.entry(0, 1).as_constant().unwrap(), (rat(1) - c).recip());
        }
    }

    #[test]
    fn c_equal_one_fails_transversality() {
        let pi = PoissonBivector::standard_symplectic(1);
        match gauge_poisson(&pi, &c_dxdy(rat(1)), &[0.25, 0.5]) {
            Err(Error::Transversality { point, .. }) => assert_eq!(point, vec![0.25, 0.5]),
            other => panic!("expected a transversality error, got {other:?}"),
        }
        assert!(gauge_poisson_symbolic(&pi, &c_dxdy(rat(1))).is_err());
    }

    #[test]
    fn non_closed_forms_are_rejected() {
        let w = PolyKForm::from_components(3, 2, [(vec![0, 1], PolyScalar::var(3, 2))]);
        assert!(matches!(GaugeTransform::new(w), Err(Error::NotClosed)));
    }

    #[test]
    fn non_constant_determinant_is_refused() {
        let pi = PoissonBivector::standard_symplectic(1);
        let w = GaugeTransform::new(PolyKForm::from_components(2, 2, [(vec![0, 1], PolyScalar::var(2, 0))])).unwrap();
        assert!(matches!(gauge_poisson_symbolic(&pi, &w), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_closed_form_breaks_the_bracket() {
        // ω = z dx∧dy on ℝ³: R_ω⟦∂x, ∂y⟧ ≠ ⟦R_ω ∂x, R_ω ∂y⟧ in the dz direction
        let w = PolyKForm::from_components(3, 2, [(vec![0, 1], PolyScalar::var(3, 2))]);
        let e = |i: usize| {
            GeneralizedSection::vector(PolyKVector::from_components(3, 1, [(vec![i], PolyScalar::one(3))]))
        };
        let lhs = gauge_section(&w, &courant_bracket(&e(0), &e(1)).unwrap()).unwrap();
        let rhs = courant_bracket(&gauge_section(&w, &e(0)).unwrap(), &gauge_section(&w, &e(1)).unwrap()).unwrap();
        assert_ne!(lhs, rhs);
    }

    fn random_closed(rng: &mut ChaCha8Rng, n: usize) -> PolyKForm {
        let g = RandomPoly { max_degree: 2, max_terms: 2, coeff_bound: 3 };
        let a: PolyKForm = g.tensor(rng, n, 1);
        a.d()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn closed_gauge_preserves_the_bracket(seed in any::<u64>(), n in 2usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = GaugeTransform::new(random_closed(&mut rng, n)).unwrap();
            let g = RandomPoly { max_degree: 2, max_terms: 2, coeff_bound: 3 };
            let s1 = GeneralizedSection::new(g.tensor(&mut rng, n, 1), g.tensor(&mut rng, n, 1)).unwrap();
            let s2 = GeneralizedSection::new(g.tensor(&mut rng, n, 1), g.tensor(&mut rng, n, 1)).unwrap();
            let lhs = w.apply(&courant_bracket(&s1, &s2).unwrap()).unwrap();
            let rhs = courant_bracket(&w.apply(&s1).unwrap(), &w.apply(&s2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn gauge_preserves_pairing_and_range(seed in any::<u64>(), n in 2usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = GaugeTransform::new(random_closed(&mut rng, n)).unwrap();
            let g = RandomPoly { max_degree: 1, max_terms: 2, coeff_bound: 2 };
            let pi = PoissonBivector::new(g.tensor(&mut rng, n, 2)).unwrap();
            let x: Vec<f64> = (0..n).map(|i| 0.05 * (i as f64 + 1.0)).collect();
            let e = graph_of_poisson(&pi);
            let before = e.fiber(&x).unwrap();
            let after = gauge_transform_fiber(&e, &w, &x).unwrap().fiber(&x).unwrap();
            prop_assert!(max_abs(&(gram(&after) - gram(&before))) < 1e-12);
            if let Ok(pw) = gauge_poisson(&pi, &w, &x) {
                prop_assert_eq!(rank(&pw, RANK_TOL), rank(&pi.matrix_at(&x), RANK_TOL));
                // the fiber computation agrees with the closed form
                let gp = LagrangianFrame::pointwise(x.clone(), {
                    let mut m = DMatrix::zeros(2 * n, n);
                    m.rows_mut(0, n).copy_from(&pw.transpose());
                    m.rows_mut(n, n).copy_from(&DMatrix::identity(n, n));
                    m
                }).unwrap();
                let d = crate::numeric::linalg::span_distance(&gp.fiber(&x).unwrap(), &after);
                prop_assert!(d < 1e-9, "span distance {}", d);
            }
        }
    }
}
