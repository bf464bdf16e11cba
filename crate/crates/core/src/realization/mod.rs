//! Symplectic realizations from Poisson sprays.
//!
//! On the chart `(q, p)` of `T*ℝⁿ` a spray is
//! `X = Σ πⁱʲ(q) p_i ∂_{qʲ} + ½ Σ Γⁱʲ_k(q) p_i p_j ∂_{p_k}`. Flows follow the
//! convention `ẋ = −X`, so `Φ₋ₛ` is the solution of `ẋ = +X` at time `s`.
//! The realization form is `ω = ∫₀¹ (Φ₋ₛ)*ω_can ds`, with `s = τ` and
//! `t = τ ∘ Φ₋₁`.

mod dual;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use dual::{
    bracket_relations, closedness_residual, invariant_vector_fields, verify_dual_pair, BracketRelations,
    DualPairReport, InvariantFields, InvariantResiduals,
};

use crate::error::{check_dim, Error, Result};
use crate::fields::{CompiledField, PolyKVector, PolyScalar, Rational};
use crate::numeric::linalg::condition_number;
use crate::numeric::ode::{integrate_variational, FlowPoint};
use crate::numeric::quadrature::gauss_legendre_unit;
use crate::poisson::PoissonBivector;

/// Condition number above which `ω_p` counts as degenerate.
pub const DEGENERATE_CONDITION: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct SprayField {
    pi: PoissonBivector,
    /// `Γⁱʲ_k` keyed by `(i, j, k)` with `i ≤ j`, as polynomials in `q`.
    gamma: BTreeMap<(usize, usize, usize), PolyScalar>,
    field: PolyKVector,
    compiled: CompiledField,
}

impl SprayField {
    /// `gamma` lists `((i, j, k), Γⁱʲ_k)`; an entry for `(j, i, k)` must agree
    /// with the one for `(i, j, k)` if both are given.
    pub fn new<I>(pi: PoissonBivector, gamma: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, usize), PolyScalar)>,
    {
        let n = pi.dim();
        let mut g: BTreeMap<(usize, usize, usize), PolyScalar> = BTreeMap::new();
        for ((i, j, k), c) in gamma {
            if i >= n || j >= n || k >= n {
                return Err(Error::Invalid(format!("spray coefficient ({i}, {j}, {k}) out of range")));
            }
            check_dim(n, c.nvars())?;
            let key = (i.min(j), i.max(j), k);
            if let Some(prev) = g.get(&key) {
                if *prev != c {
                    return Err(Error::Invalid(format!("spray coefficients are not symmetric in ({i}, {j})")));
                }
            }
            if !c.is_zero() {
                g.insert(key, c);
            }
        }
        let field = build_field(&pi, &g);
        let compiled = CompiledField::new(&field);
        Ok(SprayField {
            pi,
            gamma: g,
            field,
            compiled,
        })
    }

    /// Base dimension `n`; the spray lives on `2n` coordinates.
    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    pub fn poisson(&self) -> &PoissonBivector {
        &self.pi
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> PolyScalar {
        self.gamma
            .get(&(i.min(j), i.max(j), k))
            .cloned()
            .unwrap_or_else(|| PolyScalar::zero(self.dim()))
    }

    pub fn vector_field(&self) -> &PolyKVector {
        &self.field
    }

    /// `q`-components are linear in `p` and `p`-components quadratic, which
    /// is `κ_t*X = tX` for the fiberwise scaling `κ_t`.
    pub fn is_homogeneous(&self) -> bool {
        let n = self.dim();
        let comps = self.field.to_vec();
        comps.iter().enumerate().all(|(a, c)| {
            let want = if a < n { 1 } else { 2 };
            c.degrees_in(n..2 * n).all(|d| d == want)
        })
    }

    /// `dτ(X_μ) = π♯(μ)`, checked exactly.
    pub fn projects_to_sharp(&self) -> bool {
        let n = self.dim();
        let comps = self.field.to_vec();
        (0..n).all(|j| comps[j] == sharp_of_momentum(&self.pi, j))
    }

    pub fn eval(&self, x: &[f64]) -> DVector<f64> {
        self.compiled.eval(x)
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        self.compiled.jacobian(x)
    }
}

/// `Σ_i πⁱʲ(q) p_i` on the `2n` chart.
fn sharp_of_momentum(pi: &PoissonBivector, j: usize) -> PolyScalar {
    let n = pi.dim();
    let mut out = PolyScalar::zero(2 * n);
    for i in 0..n {
        let e = pi.entry(i, j);
        if !e.is_zero() {
            out = &out + &(&e.embed(2 * n, 0) * &PolyScalar::var(2 * n, n + i));
        }
    }
    out
}

fn build_field(pi: &PoissonBivector, gamma: &BTreeMap<(usize, usize, usize), PolyScalar>) -> PolyKVector {
    let n = pi.dim();
    let mut comps: Vec<PolyScalar> = (0..n).map(|j| sharp_of_momentum(pi, j)).collect();
    comps.extend((0..n).map(|_| PolyScalar::zero(2 * n)));
    let half = Rational::new(1.into(), 2.into());
    for (&(i, j, k), c) in gamma {
        let pp = &PolyScalar::var(2 * n, n + i) * &PolyScalar::var(2 * n, n + j);
        // off-diagonal pairs appear twice in the symmetric sum
        let c = if i == j { c.scale(&half) } else { c.clone() };
        comps[n + k] = &comps[n + k] + &(&c.embed(2 * n, 0) * &pp);
    }
    PolyKVector::from_vec(comps)
}

/// The spray with all `Γ` zero.
pub fn default_spray(pi: &PoissonBivector) -> SprayField {
    SprayField::new(pi.clone(), std::iter::empty()).expect("no coefficients to validate")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationConfig {
    /// RK4 step.
    pub step: f64,
    /// Number of Gauss–Legendre nodes on `[0, 1]`.
    pub quadrature_order: usize,
    /// Trajectories must keep `‖p‖ ≤ radius`.
    pub radius: f64,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        RealizationConfig {
            step: 1e-3,
            quadrature_order: 8,
            radius: 1.0,
        }
    }
}

impl RealizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Invalid(format!("step must be positive, got {}", self.step)));
        }
        if self.quadrature_order == 0 {
            return Err(Error::Invalid("quadrature order must be at least 1".into()));
        }
        if !(self.radius > 0.0) {
            return Err(Error::Invalid(format!("radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    fn inside(&self, n: usize) -> impl Fn(&DVector<f64>) -> bool {
        let r = self.radius;
        move |x: &DVector<f64>| x.rows(n, n).norm() <= r
    }
}

/// Runs `ẋ = sign·X` from `point` and returns the states at `times` (all of
/// the same sign as the direction of travel, ascending in magnitude).
fn run(spray: &SprayField, point: &[f64], times: &[f64], sign: f64, config: &RealizationConfig) -> Result<Vec<FlowPoint>> {
    config.validate()?;
    let n = spray.dim();
    check_dim(2 * n, point.len())?;
    let x0 = DVector::from_column_slice(point);
    if !config.inside(n)(&x0) {
        return Err(Error::DomainEscape {
            start: point.to_vec(),
            time: 0.0,
        });
    }
    let rhs = |_t: f64, x: &DVector<f64>| {
        let xs = x.as_slice();
        (spray.eval(xs) * sign, spray.jacobian(xs) * sign)
    };
    integrate_variational(rhs, 0.0, &x0, times, config.step, config.inside(n)).map_err(|e| Error::DomainEscape {
        start: point.to_vec(),
        // reported in the time of Φ, which runs along −X
        time: -e.time * sign,
    })
}

/// `Φ_t(point)` and its jacobian, with `Φ_t` the flow of `ẋ = −X`.
pub fn flow(spray: &SprayField, point: &[f64], t: f64, config: &RealizationConfig) -> Result<(DVector<f64>, DMatrix<f64>)> {
    // ẋ = −X run for time t is ẋ = sign·X run for |t|
    let sign = if t > 0.0 { -1.0 } else { 1.0 };
    let mut pts = run(spray, point, &[t.abs()], sign, config)?;
    let p = pts.pop().expect("one checkpoint");
    Ok((p.state, p.jacobian))
}

/// `ω_can = Σ dq_i ∧ dp_i` as a matrix `Ω_ab = ω(e_a, e_b)`.
pub fn canonical_form(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

/// Everything the realization needs at one point of `T*ℝⁿ`.
#[derive(Clone, Debug, Serialize)]
pub struct RealizationSample {
    pub point: Vec<f64>,
    /// `ω_p` as `Ω_ab = ω(e_a, e_b)`.
    #[serde(serialize_with = "ser_matrix")]
    pub omega: DMatrix<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub ds: DMatrix<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub dt: DMatrix<f64>,
    pub condition: f64,
}

fn ser_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in m.row_iter() {
        seq.serialize_element(&r.iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}

impl RealizationSample {
    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.condition < DEGENERATE_CONDITION)
    }

    /// `Π_P = −Ω⁻¹`, the Poisson tensor of `ω_p`.
    pub fn poisson_tensor(&self) -> Result<DMatrix<f64>> {
        let degenerate = || Error::Degenerate {
            point: self.point.clone(),
            condition: self.condition,
        };
        if self.is_degenerate() {
            return Err(degenerate());
        }
        self.omega.clone().try_inverse().map(|m| -m).ok_or_else(degenerate)
    }
}

/// One backward integration from `point`, stopping at the quadrature nodes
/// and at time 1.
pub fn sample(spray: &SprayField, point: &[f64], config: &RealizationConfig) -> Result<RealizationSample> {
    config.validate()?;
    let n = spray.dim();
    let (nodes, weights) = gauss_legendre_unit(config.quadrature_order);
    let mut times = nodes.clone();
    times.push(1.0);
    let pts = run(spray, point, &times, 1.0, config)?;
    let can = canonical_form(n);
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for (fp, w) in pts.iter().zip(&weights) {
        omega += fp.jacobian.transpose() * &can * &fp.jacobian * *w;
    }
    // exact skew part; the symmetric part is rounding only
    let omega = (&omega - omega.transpose()) * 0.5;
    let end = pts.last().expect("time 1 checkpoint");
    let mut ds = DMatrix::zeros(n, 2 * n);
    ds.columns_mut(0, n).fill_with_identity();
    Ok(RealizationSample {
        point: point.to_vec(),
        condition: condition_number(&omega),
        omega,
        s: point[..n].to_vec(),
        t: end.state.rows(0, n).iter().copied().collect(),
        ds,
        dt: end.jacobian.rows(0, n).into_owned(),
    })
}

/// `ω_p` alone.
pub fn realization_form(spray: &SprayField, point: &[f64], config: &RealizationConfig) -> Result<DMatrix<f64>> {
    let s = sample(spray, point, config)?;
    if s.is_degenerate() {
        return Err(Error::Degenerate {
            point: s.point,
            condition: s.condition,
        });
    }
    Ok(s.omega)
}

/// `(s(p), t(p), ds, dt)`.
pub fn source_target(
    spray: &SprayField,
    point: &[f64],
    config: &RealizationConfig,
) -> Result<(Vec<f64>, Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let s = sample(spray, point, config)?;
    Ok((s.s, s.t, s.ds, s.dt))
}
