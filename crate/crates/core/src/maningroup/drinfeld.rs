//! The Drinfeld bivector, the dressing action and the identities relating them.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{GroupChart, ManinTriple, AD_TOL};
use crate::error::{Error, Result};
use crate::exact::RatMatrix;
use crate::numeric::fd;
use crate::numeric::linalg::{column_space, max_abs, RANK_TOL};
use crate::report::ResidualReport;

fn check_chart(triple: &ManinTriple, chart: &GroupChart, x: &[f64]) -> Result<f64> {
    crate::error::check_dim(triple.half_dim(), chart.dim())?;
    let r = chart.ad_residual(triple, x)?;
    if r > AD_TOL {
        return Err(Error::AdInvariant { residual: r });
    }
    Ok(r)
}

/// `P_ab = ⟨pr_g(Ad_g ν_a), pr_h(Ad_g ν_b)⟩` for the `h`-basis `ν`: the bivector
/// on left-invariant forms `⟨θ^L, ν_a⟩`.
pub fn drinfeld_bivector(triple: &ManinTriple, chart: &GroupChart, x: &[f64]) -> Result<DMatrix<f64>> {
    check_chart(triple, chart, x)?;
    let ad = chart.ad(x);
    let (g, h) = (triple.g_basis().to_f64(), triple.h_basis().to_f64());
    let b = triple.algebra().metric_f64();
    let n = triple.half_dim();
    let moved = &ad * &h;
    let mut pg = DMatrix::zeros(b.nrows(), n);
    let mut ph = DMatrix::zeros(b.nrows(), n);
    for a in 0..n {
        let (gc, hc) = triple.split(&moved.column(a).into_owned());
        pg.set_column(a, &(&g * gc));
        ph.set_column(a, &(&h * hc));
    }
    let p = pg.transpose() * b * ph;
    let skew = max_abs(&(&p + p.transpose()));
    if skew > 1e-12 * max_abs(&p).max(1.0) {
        return Err(Error::AdInvariant { residual: skew });
    }
    Ok(p)
}

/// `Π_ij = π(dx_i, dx_j)` in chart coordinates: `(QᵀL)⁻¹ P (LᵀQ)⁻¹` with
/// `Q = ⟨g, h⟩` and `L` the left trivialization.
pub fn chart_bivector(triple: &ManinTriple, chart: &GroupChart, x: &[f64]) -> Result<DMatrix<f64>> {
    let p = drinfeld_bivector(triple, chart, x)?;
    let m = chart.left_trivialization(x).transpose() * triple.pairing_gh();
    let minv = m
        .try_inverse()
        .ok_or_else(|| Error::Chart(format!("{}: chart is singular at {x:?}", chart.name())))?;
    Ok(minv.transpose() * p * minv)
}

/// Largest component of the finite-difference Jacobiator of [`chart_bivector`].
pub fn chart_jacobiator(triple: &ManinTriple, chart: &GroupChart, x: &[f64], h: f64) -> Result<f64> {
    let n = chart.dim();
    let pi = chart_bivector(triple, chart, x)?;
    let flat = |y: &[f64]| match chart_bivector(triple, chart, y) {
        Ok(p) => DVector::from_fn(n * n, |r, _| p[(r / n, r % n)]),
        Err(_) => DVector::from_element(n * n, f64::NAN),
    };
    let d = fd::jacobian(flat, x, h);
    let dp = |j: usize, k: usize, l: usize| d[(j * n + k, l)];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let s: f64 = (0..n)
                    .map(|l| pi[(l, i)] * dp(j, k, l) + pi[(l, j)] * dp(k, i, l) + pi[(l, k)] * dp(i, j, l))
                    .sum();
                worst = worst.max(if s.is_nan() { f64::INFINITY } else { s.abs() });
            }
        }
    }
    Ok(worst)
}

/// `ι_{ϱ(ζ)}θ^L = Ad_{g⁻¹} pr_g(Ad_g ζ)`, in `g`-basis coordinates.
pub fn dressing_action(triple: &ManinTriple, chart: &GroupChart, x: &[f64], zeta: &DVector<f64>) -> Result<DVector<f64>> {
    crate::error::check_dim(triple.algebra().dim(), zeta.len())?;
    crate::error::check_dim(chart.dim(), x.len())?;
    let moved = chart.ad(x) * zeta;
    let pg = triple.pr_g(&moved);
    let minus: Vec<f64> = x.iter().map(|v| -v).collect();
    Ok(triple.split(&(chart.ad(&minus) * pg)).0)
}

/// `ϱ(ζ)` as a chart vector field: `L⁻¹` applied to [`dressing_action`].
pub fn dressing_vector_field(
    triple: &ManinTriple,
    chart: &GroupChart,
    x: &[f64],
    zeta: &DVector<f64>,
) -> Result<DVector<f64>> {
    let v = dressing_action(triple, chart, x, zeta)?;
    chart
        .left_trivialization(x)
        .lu()
        .solve(&v)
        .ok_or_else(|| Error::Chart(format!("{}: chart is singular at {x:?}", chart.name())))
}

#[derive(Clone, Debug, Serialize)]
pub struct EMapReport {
    /// `⟨𝖾(ζ₁), 𝖾(ζ₂)⟩ − ⟨ζ₁, ζ₂⟩`.
    pub metric: ResidualReport,
    /// `[ϱ(ζ₁), ϱ(ζ₂)] − ϱ([ζ₁, ζ₂])`.
    pub bracket: ResidualReport,
    /// `L_{ϱ(ζ₁)}θ^L − Ad_{g⁻¹}pr_g[Ad_g θ^L, Ad_g ζ₁]`.
    pub maurer_cartan: ResidualReport,
}

fn nan_field(n: usize) -> DVector<f64> {
    DVector::from_element(n, f64::NAN)
}

fn residual_or_inf(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

/// Metric, bracket and Maurer–Cartan identities of `𝖾(ζ) = ϱ(ζ) + ⟨θ^L, ζ⟩`
/// at each point, with finite-difference step `h`.
pub fn e_map_residuals(
    triple: &ManinTriple,
    chart: &GroupChart,
    points: &[Vec<f64>],
    z1: &DVector<f64>,
    z2: &DVector<f64>,
    h: f64,
) -> Result<EMapReport> {
    let d = triple.algebra().dim();
    crate::error::check_dim(d, z1.len())?;
    crate::error::check_dim(d, z2.len())?;
    for p in points {
        crate::error::check_dim(chart.dim(), p.len())?;
    }
    let alg = triple.algebra();
    let (g, b) = (triple.g_basis().to_f64(), alg.metric_f64());
    let n = chart.dim();
    fn field<'a>(t: &'a ManinTriple, c: &'a GroupChart, z: &'a DVector<f64>) -> impl Fn(&[f64]) -> DVector<f64> + 'a {
        move |y: &[f64]| dressing_vector_field(t, c, y, z).unwrap_or_else(|_| nan_field(c.dim()))
    }
    let z12 = alg.bracket_f64(z1, z2);
    let pairing = z1.dot(&(&b * z2));

    let rows: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|x| {
            let l = chart.left_trivialization(x);
            let mu = |z: &DVector<f64>| l.transpose() * g.transpose() * &b * z;
            let metric = residual_or_inf((|| {
                let v1 = dressing_vector_field(triple, chart, x, z1)?;
                let v2 = dressing_vector_field(triple, chart, x, z2)?;
                Ok((mu(z1).dot(&v2) + mu(z2).dot(&v1) - pairing).abs())
            })());
            let bracket = residual_or_inf((|| {
                let lhs = fd::lie_bracket(field(triple, chart, z1), field(triple, chart, z2), x, h);
                let rhs = dressing_vector_field(triple, chart, x, &z12)?;
                Ok((lhs - rhs).amax())
            })());
            let mc = residual_or_inf((|| {
                let xf = field(triple, chart, z1);
                let big_x = xf(x);
                let dx = fd::jacobian(&xf, x, h);
                let dl = fd::jacobian(|y: &[f64]| DVector::from_column_slice(chart.left_trivialization(y).as_slice()), x, h);
                let ad = chart.ad(x);
                let minus: Vec<f64> = x.iter().map(|v| -v).collect();
                let ad_inv = chart.ad(&minus);
                let az = &ad * z1;
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    // X^j ∂_j θ_i + θ_j ∂_i X^j, in g-coordinates
                    let mut lhs = DVector::zeros(n);
                    for j in 0..n {
                        let dtheta = DVector::from_fn(n, |r, _| dl[(i * n + r, j)]);
                        lhs += dtheta * big_x[j] + l.column(j) * dx[(j, i)];
                    }
                    let theta = &g * l.column(i);
                    let inner = alg.bracket_f64(&(&ad * theta), &az);
                    let rhs = triple.split(&(&ad_inv * triple.pr_g(&inner))).0;
                    worst = worst.max((lhs - rhs).amax());
                }
                Ok(worst)
            })());
            (metric, bracket, mc)
        })
        .collect();
    let pick = |f: fn(&(f64, f64, f64)) -> f64| {
        ResidualReport::from_samples(points.iter().cloned().zip(rows.iter().map(f)))
    };
    Ok(EMapReport {
        metric: pick(|r| r.0),
        bracket: pick(|r| r.1),
        maurer_cartan: pick(|r| r.2),
    })
}

/// `J₁Π(g₁)J₁ᵀ + J₂Π(g₂)J₂ᵀ − Π(g₁g₂)` per pair, with `J_i` the
/// finite-difference partial differentials of multiplication in the chart.
pub fn verify_multiplicativity(
    triple: &ManinTriple,
    chart: &GroupChart,
    pairs: &[(Vec<f64>, Vec<f64>)],
    h: f64,
) -> Result<ResidualReport> {
    let n = chart.dim();
    let rows: Vec<Result<(Vec<f64>, f64)>> = pairs
        .par_iter()
        .map(|(x1, x2)| {
            let x12 = chart.multiply(x1, x2)?;
            let mult = |a: &[f64], b: &[f64]| {
                chart.multiply(a, b).map(DVector::from_vec).unwrap_or_else(|_| nan_field(n))
            };
            let j1 = fd::jacobian(|y| mult(y, x2), x1, h);
            let j2 = fd::jacobian(|y| mult(x1, y), x2, h);
            let lhs = &j1 * chart_bivector(triple, chart, x1)? * j1.transpose()
                + &j2 * chart_bivector(triple, chart, x2)? * j2.transpose();
            let r = max_abs(&(lhs - chart_bivector(triple, chart, &x12)?));
            let mut point = x1.clone();
            point.extend_from_slice(x2);
            Ok((point, if r.is_nan() { f64::INFINITY } else { r }))
        })
        .collect();
    Ok(ResidualReport::from_samples(rows.into_iter().collect::<Result<Vec<_>>>()?))
}

/// `k ⊂ g` and a candidate `l ⊂ 𝔡`, both as basis columns in `𝔡`-coordinates.
#[derive(Clone, Debug)]
pub struct HomogeneousSpaceData {
    pub k: RatMatrix,
    pub l: RatMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneousReport {
    pub holds: bool,
    pub witness: Option<String>,
    /// Largest component of `Ad_{exp ξ} l` off `l` over the generators.
    pub ad_residual: f64,
    /// Invariance is only tested on `exp` of the generators, which decides
    /// it for connected `K` alone.
    pub connected_only: bool,
}

fn is_subalgebra(triple: &ManinTriple, s: &RatMatrix) -> Option<(usize, usize)> {
    let cols = s.columns();
    for (i, x) in cols.iter().enumerate() {
        for (j, y) in cols.iter().enumerate().skip(i + 1) {
            let br = RatMatrix::from_columns(s.nrows(), &[triple.algebra().bracket(x, y)]);
            if !s.span_contains(&br) {
                return Some((i + 1, j + 1));
            }
        }
    }
    None
}

/// Exact checks that `l` is a Lagrangian subalgebra with `l ∩ g = k`, plus
/// numerical `Ad`-invariance of `l` under `exp ξ` for each generator `ξ`
/// (chart coordinates).
pub fn homogeneous_space_check(
    triple: &ManinTriple,
    chart: &GroupChart,
    data: &HomogeneousSpaceData,
    generators: &[Vec<f64>],
) -> HomogeneousReport {
    let mut report = HomogeneousReport {
        holds: false,
        witness: None,
        ad_residual: 0.0,
        connected_only: true,
    };
    let fail = |mut r: HomogeneousReport, w: String| {
        r.witness = Some(w);
        r
    };
    let d = triple.algebra().dim();
    let (k, l) = (&data.k, &data.l);
    if k.nrows() != d || l.nrows() != d {
        return fail(report, format!("k and l vectors must have {d} entries"));
    }
    if !triple.g_basis().span_contains(k) {
        return fail(report, "k is not contained in g".into());
    }
    if let Some((i, j)) = is_subalgebra(triple, k) {
        return fail(report, format!("k is not a subalgebra: [k{i}, k{j}] leaves it"));
    }
    if 2 * l.ncols() != d || l.rank() != l.ncols() {
        return fail(report, format!("l must have an independent basis of {} vectors", d / 2));
    }
    let cols = l.columns();
    for (i, x) in cols.iter().enumerate() {
        for (j, y) in cols.iter().enumerate().skip(i) {
            let v = triple.algebra().pairing(x, y);
            if v != num_traits::Zero::zero() {
                return fail(report, format!("l is not Lagrangian: ⟨l{}, l{}⟩ = {v}", i + 1, j + 1));
            }
        }
    }
    if let Some((i, j)) = is_subalgebra(triple, l) {
        return fail(report, format!("l is not a subalgebra: [l{i}, l{j}] leaves it"));
    }
    let meet = triple.g_basis().span_intersection(l);
    if meet.rank() != k.rank() || !meet.span_contains(k) {
        return fail(report, format!("l ∩ g has dimension {} and differs from k", meet.rank()));
    }
    let q = column_space(&l.to_f64(), RANK_TOL);
    let off = DMatrix::identity(d, d) - &q * q.transpose();
    for xi in generators {
        if xi.len() != chart.dim() {
            return fail(report, format!("generators must have {} entries", chart.dim()));
        }
        let r = max_abs(&(&off * chart.ad(xi) * &q));
        report.ad_residual = report.ad_residual.max(r);
        if !(r < AD_TOL) {
            return fail(report, format!("Ad_exp(ξ) moves l off itself by {r:e} at ξ = {xi:?}"));
        }
    }
    report.holds = true;
    report
}
