use std::path::Path;

use anyhow::Result;
use serde_json::json;

use diraclab::fields::json::poly_to_json;
use diraclab::poisson::{leaf_data_at_point, PoissonBivector};

use super::{summarize, Ctx};
use crate::input;
use crate::report::{Criterion, Outcome};

fn jacobi_criterion(pi: &PoissonBivector) -> (Criterion, diraclab::fields::PolyKVector) {
    let jac = pi.jacobiator();
    let witnesses = jac
        .components()
        .map(|(idx, p)| {
            let one_based: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            format!("Υ({}) = {p}", one_based.join(","))
        })
        .collect();
    (Criterion::exact("jacobiator", jac.is_zero(), summarize(witnesses, 5)), jac)
}

pub fn check(_: &Ctx, file: &Path) -> Result<Outcome> {
    let pi = input::bivector(file)?;
    Ok(Outcome::new().criterion(jacobi_criterion(&pi).0))
}

pub fn jacobiator(_: &Ctx, file: &Path) -> Result<Outcome> {
    let pi = input::bivector(file)?;
    let (c, jac) = jacobi_criterion(&pi);
    Ok(Outcome::new().criterion(c).data(json!({ "jacobiator": jac.to_json() })))
}

pub fn bracket(_: &Ctx, file: &Path, f: &Path, g: &Path) -> Result<Outcome> {
    let pi = input::bivector(file)?;
    let (f, g) = (input::scalar(f, pi.dim())?, input::scalar(g, pi.dim())?);
    let b = pi.bracket(&f, &g)?;
    Ok(Outcome::new().data(json!({ "bracket": poly_to_json(&b), "text": b.to_string() })))
}

pub fn leaf(_: &Ctx, file: &Path, point: &[f64]) -> Result<Outcome> {
    let pi = input::bivector(file)?;
    input::expect_len("--point", point, pi.dim())?;
    Ok(Outcome::new().data(serde_json::to_value(leaf_data_at_point(&pi, point)?)?))
}
