use std::path::Path;

use anyhow::{bail, Result};
use nalgebra::DVector;
use serde::Deserialize;
use serde_json::json;

use diraclab::exact::RatMatrix;
use diraclab::fields::json::RationalJson;
use diraclab::maningroup::{
    chart_bivector, chart_jacobiator, dressing_action, dressing_vector_field, drinfeld_bivector, e_map_residuals,
    homogeneous_space_check, verify_multiplicativity, GroupChart, HomogeneousSpaceData, ManinTriple, AD_TOL,
};
use diraclab::numeric::{fd, sampling};
use diraclab::numeric::linalg::max_abs;
use diraclab::Error;

use super::{matrix, vector, Ctx};
use crate::input;
use crate::report::{Criterion, Outcome};

pub struct TripleArg<'a> {
    pub builtin: Option<&'a str>,
    pub file: Option<&'a Path>,
}

impl TripleArg<'_> {
    fn load(&self) -> Result<(ManinTriple, GroupChart)> {
        input::triple(self.builtin, self.file)
    }
}

pub fn check(_: &Ctx, t: &TripleArg) -> Result<Outcome> {
    let (triple, chart) = t.load()?;
    let v = triple.check();
    let dual = triple.dual().check();
    Ok(Outcome::new()
        .criterion(Criterion::exact("manin_triple", v.holds, v.witness))
        .criterion(Criterion::exact("dual_triple", dual.holds, dual.witness))
        .data(json!({ "dim": triple.algebra().dim(), "chart": chart.name() })))
}

/// An `Ad` chart failing its invariants is a failed check, not bad input.
fn ad_failure(e: anyhow::Error) -> Result<Outcome> {
    match e.downcast_ref::<Error>() {
        Some(Error::AdInvariant { residual }) => {
            Ok(Outcome::new().criterion(Criterion::value("ad_invariant", *residual, None, AD_TOL)))
        }
        _ => Err(e),
    }
}

pub fn bivector(ctx: &Ctx, t: &TripleArg, point: &[f64]) -> Result<Outcome> {
    let (triple, chart) = t.load()?;
    input::expect_len("--point", point, chart.dim())?;
    let run = || -> Result<Outcome> {
        let p = drinfeld_bivector(&triple, &chart, point)?;
        let pi = chart_bivector(&triple, &chart, point)?;
        let jac = chart_jacobiator(&triple, &chart, point, fd::STEP)?;
        Ok(Outcome::new()
            .criterion(Criterion::value("skew", max_abs(&(&p + p.transpose())), Some(point.to_vec()), 1e-12))
            .criterion(Criterion::value("jacobi_fd", jac, Some(point.to_vec()), ctx.tol(1e-5)))
            .data(json!({ "point": point, "left_trivialized": matrix(&p), "chart": matrix(&pi) })))
    };
    run().or_else(ad_failure)
}

pub fn dressing(_: &Ctx, t: &TripleArg, point: &[f64], zeta: &[f64]) -> Result<Outcome> {
    let (triple, chart) = t.load()?;
    input::expect_len("--point", point, chart.dim())?;
    input::expect_len("--zeta", zeta, triple.algebra().dim())?;
    let z = DVector::from_column_slice(zeta);
    let v = dressing_action(&triple, &chart, point, &z)?;
    let x = dressing_vector_field(&triple, &chart, point, &z)?;
    Ok(Outcome::new().data(json!({ "point": point, "left_trivialized": vector(&v), "chart": vector(&x) })))
}

pub struct EMapArgs<'a> {
    pub zeta1: &'a [f64],
    pub zeta2: &'a [f64],
    pub samples: usize,
    pub q_box: f64,
}

pub fn e_map(ctx: &Ctx, t: &TripleArg, a: &EMapArgs) -> Result<Outcome> {
    let (triple, chart) = t.load()?;
    let d = triple.algebra().dim();
    input::expect_len("--zeta1", a.zeta1, d)?;
    input::expect_len("--zeta2", a.zeta2, d)?;
    let points = sampling::cube(ctx.seed, chart.dim(), a.samples, a.q_box);
    let (z1, z2) = (DVector::from_column_slice(a.zeta1), DVector::from_column_slice(a.zeta2));
    let r = e_map_residuals(&triple, &chart, &points, &z1, &z2, fd::STEP)?;
    Ok(Outcome::new()
        .criterion(Criterion::numeric("metric", &r.metric, ctx.tol(1e-9)))
        .criterion(Criterion::numeric("bracket_fd", &r.bracket, ctx.tol(1e-4)))
        .criterion(Criterion::numeric("maurer_cartan_fd", &r.maurer_cartan, ctx.tol(1e-4))))
}

pub fn multiplicativity(ctx: &Ctx, t: &TripleArg, pairs: usize, q_box: f64) -> Result<Outcome> {
    let (triple, chart) = t.load()?;
    let n = chart.dim();
    let pts = sampling::cube(ctx.seed, n, 2 * pairs, q_box);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    let run = || -> Result<Outcome> {
        let r = verify_multiplicativity(&triple, &chart, &pairs, fd::STEP)?;
        Ok(Outcome::new().criterion(Criterion::numeric("multiplicativity", &r, ctx.tol(1e-5))))
    };
    run().or_else(ad_failure)
}

/// `{"k": [vector, ...], "l": [vector, ...], "generators": [[float, ...], ...]}`
/// with `k`, `l` basis vectors in `𝔡`-coordinates and generators in chart coordinates.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomspaceJson {
    k: Vec<Vec<RationalJson>>,
    l: Vec<Vec<RationalJson>>,
    #[serde(default)]
    generators: Vec<Vec<f64>>,
}

fn columns(d: usize, what: &str, v: &[Vec<RationalJson>]) -> Result<RatMatrix> {
    let mut cols = Vec::with_capacity(v.len());
    for c in v {
        if c.len() != d {
            bail!("{what} vectors must have {d} entries");
        }
        cols.push(c.iter().map(RationalJson::to_rational).collect::<diraclab::Result<Vec<_>>>()?);
    }
    Ok(RatMatrix::from_columns(d, &cols))
}

pub fn homspace(_: &Ctx, t: &TripleArg, data: &Path) -> Result<Outcome> {
    let (triple, chart) = t.load()?;
    let j: HomspaceJson = input::json(data)?;
    let d = triple.algebra().dim();
    let hd = HomogeneousSpaceData {
        k: columns(d, "k", &j.k)?,
        l: columns(d, "l", &j.l)?,
    };
    let r = homogeneous_space_check(&triple, &chart, &hd, &j.generators);
    Ok(Outcome::new()
        .criterion(Criterion::exact("homogeneous_space", r.holds, r.witness))
        .data(json!({ "ad_residual": r.ad_residual, "connected_only": r.connected_only })))
}
