use std::path::Path;

use anyhow::{bail, Result};
use serde_json::json;

use diraclab::numeric::sampling;
use diraclab::poisson::{euler_linearize, moser_verify, FormFamily};
use diraclab::realization::{default_spray, verify_dual_pair, RealizationConfig};

use super::{summarize, Ctx};
use crate::input;
use crate::report::{Criterion, Outcome};

pub struct RealizeArgs<'a> {
    pub poisson: &'a Path,
    pub samples: usize,
    pub radius: f64,
    pub q_box: f64,
    pub step: f64,
    pub quadrature: usize,
    pub domain: f64,
}

pub fn realize(ctx: &Ctx, a: &RealizeArgs) -> Result<Outcome> {
    let pi = input::bivector(a.poisson)?;
    let config = RealizationConfig {
        step: a.step,
        quadrature_order: a.quadrature,
        radius: a.domain,
    };
    let points = sampling::cotangent(ctx.seed, pi.dim(), a.samples, a.q_box, a.radius);
    let r = verify_dual_pair(&default_spray(&pi), &pi, &points, &config)?;
    let tol = ctx.tol(1e-6);
    let failures: Vec<String> = r.failures.iter().map(|(p, why)| format!("{p:?}: {why}")).collect();
    Ok(Outcome::new()
        .criterion(Criterion::exact("flows_admissible", failures.is_empty(), summarize(failures, 3)))
        .criterion(Criterion::numeric("poisson_maps", &r.poisson_maps, tol))
        .criterion(Criterion::numeric("orthogonality", &r.orthogonality, tol))
        .criterion(Criterion::numeric("dirac_condition", &r.dirac_condition, tol))
        .data(json!({ "max_condition": r.max_condition, "config": config })))
}

pub struct MoserArgs<'a> {
    pub poisson: &'a Path,
    pub family: &'a Path,
    pub time: f64,
    pub step: f64,
    pub samples: usize,
    pub q_box: f64,
}

pub fn moser(ctx: &Ctx, a: &MoserArgs) -> Result<Outcome> {
    let pi = input::bivector(a.poisson)?;
    let n = pi.dim();
    let form = input::form(a.family)?;
    // a form on ℝⁿ is a constant family; on ℝⁿ⁺¹ the last coordinate is time
    let family = if form.dim() == n {
        FormFamily::constant(&form)
    } else if form.dim() == n + 1 {
        FormFamily::new(n, form)?
    } else {
        bail!("{}: family lives on {} variables, expected {n} or {}", a.family.display(), form.dim(), n + 1);
    };
    let grid = sampling::cube(ctx.seed, n, a.samples, a.q_box);
    let r = moser_verify(&pi, &family, a.time, &grid, a.step)?;
    Ok(Outcome::new().criterion(Criterion::numeric("moser", &r, ctx.tol(1e-6))))
}

pub fn linearize(ctx: &Ctx, field: &Path, samples: usize, radius: f64, step: f64) -> Result<Outcome> {
    let x = input::vector_tensor(field, 1)?;
    let points = sampling::ball(ctx.seed, x.dim(), samples, radius);
    let r = euler_linearize(&x, &points, step)?;
    Ok(Outcome::new()
        .criterion(Criterion::numeric("conjugation", &r.residual, ctx.tol(1e-5)))
        .data(json!({ "samples": points, "images": r.images })))
}
