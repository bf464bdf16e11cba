//! Dual-pair certification and the left/right invariant vector fields.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{sample, RealizationConfig, RealizationSample, SprayField};
use crate::dirac::{graph_of_poisson, pullback_dirac_fiber};
use crate::error::{check_dim, Result};
use crate::fields::PolyKForm;
use crate::numeric::fd;
use crate::numeric::linalg::{max_abs, null_space, span_distance, RANK_TOL};
use crate::poisson::PoissonBivector;
use crate::report::ResidualReport;

#[derive(Clone, Debug, Serialize)]
pub struct DualPairReport {
    /// `dt Π_P dtᵀ = Π(t)` and `ds Π_P dsᵀ = −Π(s)`.
    pub poisson_maps: ResidualReport,
    /// `ω(ker dt, ker ds) = 0`.
    pub orthogonality: ResidualReport,
    /// `R_ω(t^!Gr π) = s^!Gr π` as a span distance.
    pub dirac_condition: ResidualReport,
    /// Largest condition number of `ω_p` over the samples.
    pub max_condition: f64,
    /// Samples where the flow escaped or `ω_p` was degenerate, with the reason.
    pub failures: Vec<(Vec<f64>, String)>,
}

impl DualPairReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.failures.is_empty()
            && self.poisson_maps.passes(tol)
            && self.orthogonality.passes(tol)
            && self.dirac_condition.passes(tol)
    }
}

struct Residuals {
    poisson_maps: f64,
    orthogonality: f64,
    dirac_condition: f64,
}

fn residuals_at(smp: &RealizationSample, pi: &PoissonBivector) -> Result<Residuals> {
    let n = smp.dim();
    let pp = smp.poisson_tensor()?;
    let at_t = pi.matrix_at(&smp.t);
    let at_s = pi.matrix_at(&smp.s);
    let poisson_maps = max_abs(&(&smp.dt * &pp * smp.dt.transpose() - at_t))
        .max(max_abs(&(&smp.ds * &pp * smp.ds.transpose() + at_s)));

    let kt = null_space(&smp.dt, RANK_TOL);
    let ks = null_space(&smp.ds, RANK_TOL);
    let orthogonality = if kt.ncols() != n || ks.ncols() != n {
        // t or s is not a submersion here
        f64::INFINITY
    } else {
        max_abs(&(kt.transpose() * &smp.omega * ks))
    };

    let gr = graph_of_poisson(pi);
    let et = pullback_dirac_fiber(&gr.fiber(&smp.t)?, &smp.dt, &smp.point)?;
    let es = pullback_dirac_fiber(&gr.fiber(&smp.s)?, &smp.ds, &smp.point)?;
    // R_ω(v + μ) = v + μ + ι_vω, with ι_vω = Ωᵀv
    let mut shifted = et.clone();
    let shift = smp.omega.transpose() * et.rows(0, 2 * n);
    let mut forms = shifted.rows_mut(2 * n, 2 * n);
    forms += shift;
    let dirac_condition = span_distance(&shifted, &es);
    Ok(Residuals {
        poisson_maps,
        orthogonality,
        dirac_condition,
    })
}

/// Certifies `ℝⁿ ←t (P, ω) s→ ℝⁿ` as a dual pair on the sample points.
/// Escapes and degenerate samples are listed and count as infinite residuals.
pub fn verify_dual_pair(
    spray: &SprayField,
    pi: &PoissonBivector,
    points: &[Vec<f64>],
    config: &RealizationConfig,
) -> Result<DualPairReport> {
    check_dim(spray.dim(), pi.dim())?;
    config.validate()?;
    for p in points {
        check_dim(2 * pi.dim(), p.len())?;
    }
    let per_point: Vec<(std::result::Result<Residuals, String>, f64)> = points
        .par_iter()
        .map(|x| match sample(spray, x, config) {
            Ok(smp) => {
                let c = smp.condition;
                (residuals_at(&smp, pi).map_err(|e| e.to_string()), c)
            }
            Err(e) => (Err(e.to_string()), f64::INFINITY),
        })
        .collect();
    let mut out = DualPairReport {
        poisson_maps: ResidualReport::empty(),
        orthogonality: ResidualReport::empty(),
        dirac_condition: ResidualReport::empty(),
        max_condition: 0.0,
        failures: Vec::new(),
    };
    for (x, (r, c)) in points.iter().zip(per_point) {
        out.max_condition = out.max_condition.max(c);
        match r {
            Ok(r) => {
                out.poisson_maps.push(x.clone(), r.poisson_maps);
                out.orthogonality.push(x.clone(), r.orthogonality);
                out.dirac_condition.push(x.clone(), r.dirac_condition);
            }
            Err(msg) => {
                for rep in [&mut out.poisson_maps, &mut out.orthogonality, &mut out.dirac_condition] {
                    rep.push(x.clone(), f64::INFINITY);
                }
                out.failures.push((x.clone(), msg));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantResiduals {
    /// `ds(α^L) = π♯α` at `s(p)`.
    pub left_related: f64,
    /// `dt(α^R) = −π♯α` at `t(p)`.
    pub right_related: f64,
    /// `ω(α^L, β^L) = −π(α, β)∘s`.
    pub left_pairing: f64,
    /// `ω(α^R, β^R) = π(α, β)∘t`.
    pub right_pairing: f64,
    /// `ω(α^L, β^R) = 0`.
    pub mixed_pairing: f64,
}

impl InvariantResiduals {
    pub fn max(&self) -> f64 {
        [
            self.left_related,
            self.right_related,
            self.left_pairing,
            self.right_pairing,
            self.mixed_pairing,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantFields {
    pub alpha_left: Vec<f64>,
    pub alpha_right: Vec<f64>,
    pub beta_left: Vec<f64>,
    pub beta_right: Vec<f64>,
    pub residuals: InvariantResiduals,
}

fn form_at(alpha: &PolyKForm, x: &[f64]) -> DVector<f64> {
    alpha.evaluate_at(x).to_vector()
}

/// `α^L = −π_P♯(s*α)` and `α^R = −π_P♯(t*α)` at one sample.
fn left_right(smp: &RealizationSample, pp: &DMatrix<f64>, alpha: &PolyKForm) -> (DVector<f64>, DVector<f64>) {
    let sa = smp.ds.transpose() * form_at(alpha, &smp.s);
    let ta = smp.dt.transpose() * form_at(alpha, &smp.t);
    (-(pp.transpose() * sa), -(pp.transpose() * ta))
}

/// Values of `α^L, α^R, β^L, β^R` at `point` and the five relations they satisfy.
pub fn invariant_vector_fields(
    spray: &SprayField,
    pi: &PoissonBivector,
    alpha: &PolyKForm,
    beta: &PolyKForm,
    point: &[f64],
    config: &RealizationConfig,
) -> Result<InvariantFields> {
    let n = pi.dim();
    check_dim(spray.dim(), n)?;
    check_dim(n, alpha.dim())?;
    check_dim(n, beta.dim())?;
    let smp = sample(spray, point, config)?;
    let pp = smp.poisson_tensor()?;
    let (al, ar) = left_right(&smp, &pp, alpha);
    let (bl, br) = left_right(&smp, &pp, beta);
    let at_s = pi.matrix_at(&smp.s);
    let at_t = pi.matrix_at(&smp.t);
    let (a_s, b_s) = (form_at(alpha, &smp.s), form_at(beta, &smp.s));
    let (a_t, b_t) = (form_at(alpha, &smp.t), form_at(beta, &smp.t));
    let w = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &smp.omega * v)[(0, 0)];
    let pair = |m: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * m * b)[(0, 0)];
    let residuals = InvariantResiduals {
        left_related: (&smp.ds * &al - at_s.transpose() * &a_s).amax(),
        right_related: (&smp.dt * &ar + at_t.transpose() * &a_t).amax(),
        left_pairing: (w(&al, &bl) + pair(&at_s, &a_s, &b_s)).abs(),
        right_pairing: (w(&ar, &br) - pair(&at_t, &a_t, &b_t)).abs(),
        mixed_pairing: w(&al, &br).abs(),
    };
    let v = |x: DVector<f64>| x.iter().copied().collect::<Vec<f64>>();
    Ok(InvariantFields {
        alpha_left: v(al),
        alpha_right: v(ar),
        beta_left: v(bl),
        beta_right: v(br),
        residuals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketRelations {
    /// `[α^L, β^L] − [α, β]^L`.
    pub left: f64,
    /// `[α^R, β^R] + [α, β]^R`.
    pub right: f64,
    /// `[α^L, β^R]`.
    pub mixed: f64,
}

/// Bracket relations of the invariant fields by central differences of
/// step `h`. Each stencil point is a fresh realization sample.
pub fn bracket_relations(
    spray: &SprayField,
    pi: &PoissonBivector,
    alpha: &PolyKForm,
    beta: &PolyKForm,
    point: &[f64],
    config: &RealizationConfig,
    h: f64,
) -> Result<BracketRelations> {
    let n = pi.dim();
    check_dim(spray.dim(), n)?;
    let ab = pi.form_bracket(alpha, beta);
    // all four fields from one sample per point; errors surface as NaN
    let fields = |x: &[f64]| -> Result<[DVector<f64>; 6]> {
        let smp = sample(spray, x, config)?;
        let pp = smp.poisson_tensor()?;
        let (al, ar) = left_right(&smp, &pp, alpha);
        let (bl, br) = left_right(&smp, &pp, beta);
        let (cl, cr) = left_right(&smp, &pp, &ab);
        Ok([al, ar, bl, br, cl, cr])
    };
    let at = fields(point)?;
    let pick = |k: usize| {
        move |x: &[f64]| match fields(x) {
            Ok(f) => f[k].clone(),
            Err(_) => DVector::from_element(2 * n, f64::NAN),
        }
    };
    let jac: Vec<DMatrix<f64>> = (0..4).map(|k| fd::jacobian(pick(k), point, h)).collect();
    let br = |a: usize, b: usize| &jac[b] * &at[a] - &jac[a] * &at[b];
    let nan_to_inf = |x: f64| if x.is_nan() { f64::INFINITY } else { x };
    Ok(BracketRelations {
        left: nan_to_inf((br(0, 2) - &at[4]).amax()),
        right: nan_to_inf((br(1, 3) + &at[5]).amax()),
        mixed: nan_to_inf(br(0, 3).amax()),
    })
}

/// `max |∂_a ω_bc + ∂_b ω_ca + ∂_c ω_ab|` by central differences of step `h`.
pub fn closedness_residual(spray: &SprayField, point: &[f64], config: &RealizationConfig, h: f64) -> Result<f64> {
    let m = 2 * spray.dim();
    check_dim(m, point.len())?;
    sample(spray, point, config)?;
    let flat = |x: &[f64]| match sample(spray, x, config) {
        Ok(s) => DVector::from_column_slice(s.omega.as_slice()),
        Err(_) => DVector::from_element(m * m, f64::NAN),
    };
    // column-major: ω_bc sits in row b + c·m
    let d = fd::jacobian(flat, point, h);
    let dw = |a: usize, b: usize, c: usize| d[(b + c * m, a)];
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let r = dw(a, b, c) + dw(b, c, a) + dw(c, a, b);
                worst = if r.is_nan() { f64::INFINITY } else { worst.max(r.abs()) };
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::super::tests::{constant_pi, x_dx_dy};
    use super::super::{canonical_form, default_spray};
    use super::*;
    use crate::dirac::{check_poisson_map, check_poisson_map_numeric, MapSign};
    use crate::fields::{CallbackMap, PolyMap, PolyScalar};
    use crate::poisson::{lie_poisson, StructureConstants};

    fn dx(n: usize, i: usize) -> PolyKForm {
        PolyKForm::from_components(n, 1, [(vec![i], PolyScalar::one(n))])
    }

    fn random_points(seed: u64, n: usize, count: usize, qr: f64, pr: f64) -> Vec<Vec<f64>> {
        crate::numeric::sampling::cotangent(seed, n, count, qr, pr)
    }

    #[test]
    fn zero_bivector_is_a_dual_pair() {
        let pi = PoissonBivector::zero(2);
        let pts = random_points(1, 2, 6, 1.0, 0.5);
        let r = verify_dual_pair(&default_spray(&pi), &pi, &pts, &RealizationConfig::default()).unwrap();
        assert!(r.failures.is_empty());
        assert!(r.poisson_maps.max_residual < 1e-12);
        assert!(r.orthogonality.max_residual < 1e-12);
        assert!(r.dirac_condition.max_residual < 1e-12, "{r:?}");
    }

    #[test]
    fn x_dx_dy_realization_is_a_dual_pair() {
        let pi = x_dx_dy();
        let pts = random_points(7, 2, 20, 1.0, 0.2);
        let r = verify_dual_pair(&default_spray(&pi), &pi, &pts, &RealizationConfig::default()).unwrap();
        assert!(r.passes(1e-6), "{r:?}");
    }

    #[test]
    fn constant_bivector_is_near_exact() {
        let pi = constant_pi();
        let pts = random_points(3, 3, 10, 1.0, 0.5);
        let r = verify_dual_pair(&default_spray(&pi), &pi, &pts, &RealizationConfig::default()).unwrap();
        assert!(r.passes(1e-8), "{r:?}");
    }

    #[test]
    fn so3_realization_is_a_dual_pair() {
        let pi = lie_poisson(&StructureConstants::so3());
        let pts = random_points(5, 3, 8, 1.0, 0.3);
        let r = verify_dual_pair(&default_spray(&pi), &pi, &pts, &RealizationConfig::default()).unwrap();
        assert!(r.passes(1e-6), "{r:?}");
    }

    #[test]
    fn forward_pullback_breaks_the_realization() {
        // integrating along −X instead of +X gives the wrong ω; the
        // backward-flow convention is what makes t Poisson
        let pi = x_dx_dy();
        let spray = default_spray(&pi);
        let x = [0.7, -0.2, 0.15, 0.1];
        let cfg = RealizationConfig::default();
        let good = sample(&spray, &x, &cfg).unwrap();
        let (nodes, weights) = crate::numeric::quadrature::gauss_legendre_unit(8);
        let mut wrong = DMatrix::zeros(4, 4);
        for (s, w) in nodes.iter().zip(&weights) {
            let (_, j) = super::super::flow(&spray, &x, *s, &cfg).unwrap();
            wrong += j.transpose() * canonical_form(2) * &j * *w;
        }
        let bad = RealizationSample { omega: wrong, ..good.clone() };
        assert!(residuals_at(&good, &pi).unwrap().poisson_maps < 1e-8);
        assert!(residuals_at(&bad, &pi).unwrap().poisson_maps > 1e-3);
    }

    #[test]
    fn closed_form_realization_cross_check() {
        // an independent realization of x∂x∧∂y: t = (q₁, q₂ + p₁q₁), s = (q₁e^{p₂}, q₂)
        let pi = x_dx_dy();
        let std = PoissonBivector::standard_symplectic(2);
        let q = |i| PolyScalar::var(4, i);
        let t = PolyMap::new(4, vec![q(0), &q(1) + &(&q(2) * &q(0))]).unwrap();
        assert!(check_poisson_map(&t, &std, &pi, MapSign::Poisson).unwrap());
        let s = CallbackMap::new(4, 2, |x: &[f64]| DVector::from_vec(vec![x[0] * x[3].exp(), x[1]]));
        let pts = random_points(11, 2, 10, 1.0, 0.2);
        let r = check_poisson_map_numeric(&s, &std, &pi, &pts, MapSign::AntiPoisson).unwrap();
        assert!(r.max_residual < 1e-6);
        // and the spray realization satisfies the same relations
        let spray = default_spray(&pi);
        let rep = verify_dual_pair(&spray, &pi, &pts, &RealizationConfig::default()).unwrap();
        assert!(rep.poisson_maps.passes(1e-6));
    }

    #[test]
    fn escapes_are_reported_not_raised() {
        let pi = x_dx_dy();
        let cfg = RealizationConfig { radius: 0.1, ..Default::default() };
        let pts = vec![vec![0.1, 0.1, 0.05, 0.0], vec![0.1, 0.1, 0.5, 0.0]];
        let r = verify_dual_pair(&default_spray(&pi), &pi, &pts, &cfg).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].0, pts[1]);
        assert_eq!(r.poisson_maps.max_residual, f64::INFINITY);
        assert!(!r.passes(1.0));
    }

    #[test]
    fn invariant_fields_for_zero_bivector() {
        // ω = ω_can, so α^L = α^R = −π_can♯(τ*α) = −∂_{p_i} for α = dx_i
        let pi = PoissonBivector::zero(2);
        let f = invariant_vector_fields(
            &default_spray(&pi),
            &pi,
            &dx(2, 0),
            &dx(2, 1),
            &[0.2, 0.3, 0.1, -0.1],
            &RealizationConfig::default(),
        )
        .unwrap();
        let can_inv = canonical_form(2).try_inverse().unwrap();
        // π_can = −ω_can⁻¹; −π_can♯(dq₁) = −(π_can)ᵀ e₁
        let want = -((-&can_inv).transpose() * DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]));
        assert!((DVector::from_vec(f.alpha_left.clone()) - &want).amax() < 1e-14);
        assert_eq!(want, DVector::from_vec(vec![0.0, 0.0, -1.0, 0.0]));
        assert_eq!(f.alpha_left, f.alpha_right);
        assert!(f.residuals.max() < 1e-14);
    }

    #[test]
    fn zero_form_gives_zero_fields() {
        let pi = x_dx_dy();
        let f = invariant_vector_fields(
            &default_spray(&pi),
            &pi,
            &PolyKForm::zero(2, 1),
            &dx(2, 1),
            &[0.2, 0.3, 0.1, -0.1],
            &RealizationConfig::default(),
        )
        .unwrap();
        assert!(f.alpha_left.iter().chain(&f.alpha_right).all(|v| *v == 0.0));
    }

    #[test]
    fn invariant_fields_of_x_dx_dy() {
        let pi = x_dx_dy();
        let f = invariant_vector_fields(
            &default_spray(&pi),
            &pi,
            &dx(2, 0),
            &dx(2, 1),
            &[0.6, -0.4, 0.12, 0.08],
            &RealizationConfig::default(),
        )
        .unwrap();
        assert!(f.residuals.max() < 1e-6, "{:?}", f.residuals);
    }

    #[test]
    fn realization_form_is_closed() {
        let spray = default_spray(&x_dx_dy());
        let r = closedness_residual(&spray, &[1.0, 0.0, 0.1, 0.1], &RealizationConfig::default(), 1e-4).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn so3_form_is_closed() {
        let spray = default_spray(&lie_poisson(&StructureConstants::so3()));
        let r = closedness_residual(&spray, &[0.3, -0.2, 0.5, 0.1, 0.2, -0.1], &RealizationConfig::default(), 1e-4).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn bracket_relations_of_x_dx_dy() {
        let pi = x_dx_dy();
        // α = x dy, β = dx + y dx gives a non-trivial [α, β]
        let alpha = dx(2, 1).mul_scalar(&PolyScalar::var(2, 0));
        let beta = dx(2, 0).mul_scalar(&(&PolyScalar::one(2) + &PolyScalar::var(2, 1)));
        let r = bracket_relations(
            &default_spray(&pi),
            &pi,
            &alpha,
            &beta,
            &[0.6, -0.4, 0.12, 0.08],
            &RealizationConfig::default(),
            fd::STEP,
        )
        .unwrap();
        assert!(r.left < 1e-4 && r.right < 1e-4 && r.mixed < 1e-4, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn dual_pair_criteria_agree(seed in any::<u64>()) {
            let pi = lie_poisson(&StructureConstants::so3());
            let pts = random_points(seed, 3, 2, 1.0, 0.3);
            let r = verify_dual_pair(&default_spray(&pi), &pi, &pts, &RealizationConfig::default()).unwrap();
            let eps = r.dirac_condition.max_residual.max(1e-9);
            prop_assert!(r.poisson_maps.max_residual < 100.0 * eps);
            prop_assert!(r.orthogonality.max_residual < 100.0 * eps);
        }

        #[test]
        fn invariant_relations_hold(
            q in prop::array::uniform2(-1.0f64..1.0),
            p in prop::array::uniform2(-0.14f64..0.14),
            i in 0usize..2,
            j in 0usize..2,
        ) {
            let pi = x_dx_dy();
            let x = [q[0], q[1], p[0], p[1]];
            let f = invariant_vector_fields(&default_spray(&pi), &pi, &dx(2, i), &dx(2, j), &x, &RealizationConfig::default()).unwrap();
            prop_assert!(f.residuals.max() < 1e-6);
        }
    }
}
