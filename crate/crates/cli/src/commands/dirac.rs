use std::path::Path;

use anyhow::Result;
use serde_json::json;

use diraclab::dirac::{
    gauge_poisson, gauge_poisson_symbolic, integrability_tensor_exact, poisson_map_defects, pullback_dirac_at_point,
    GaugeTransform, MapSign,
};
use diraclab::fields::SmoothMap;
use diraclab::Error;

use super::{matrix, summarize, Ctx};
use crate::input;
use crate::report::{Criterion, Outcome};

pub fn check_integrability(_: &Ctx, frame: &Path) -> Result<Outcome> {
    let e = input::frame(frame)?;
    let t = integrability_tensor_exact(&e)?;
    let bad: Vec<String> = t
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|((i, j, k), v)| format!("Υ_E(σ{}, σ{}, σ{}) = {v}", i + 1, j + 1, k + 1))
        .collect();
    let holds = bad.is_empty();
    Ok(Outcome::new().criterion(Criterion::exact("integrability", holds, summarize(bad, 5))))
}

pub fn gauge(_: &Ctx, poisson: &Path, omega: &Path, point: &[f64]) -> Result<Outcome> {
    let pi = input::bivector(poisson)?;
    let w = GaugeTransform::new(input::form(omega)?)?;
    input::expect_len("--point", point, pi.dim())?;
    let mut out = Outcome::new();
    match gauge_poisson(&pi, &w, point) {
        Ok(m) => {
            out = out.criterion(Criterion::exact("transversality", true, None));
            let mut data = json!({ "point": point, "gauged": matrix(&m) });
            // a closed-form answer exists when det(I + ΠΩ) is a nonzero constant
            if let Ok(sym) = gauge_poisson_symbolic(&pi, &w) {
                let jac = sym.jacobiator();
                out = out.criterion(Criterion::exact("gauged_is_poisson", jac.is_zero(), None));
                data["symbolic"] = serde_json::to_value(sym.bivector().to_json())?;
            }
            Ok(out.data(data))
        }
        Err(Error::Transversality { detail, .. }) => Ok(out.criterion(Criterion::exact(
            "transversality",
            false,
            Some(format!("{detail} at {point:?}")),
        ))),
        Err(e) => Err(e.into()),
    }
}

pub fn pullback(_: &Ctx, frame: &Path, map: &Path, point: &[f64]) -> Result<Outcome> {
    let e = input::frame(frame)?;
    let phi = input::poly_map(map)?;
    input::expect_len("--point", point, phi.source_dim())?;
    let pulled = pullback_dirac_at_point(&phi, &e, point)?;
    Ok(Outcome::new().data(json!({ "point": point, "fiber": matrix(&pulled.fiber(point)?) })))
}

pub fn poisson_map(_: &Ctx, map: &Path, source: &Path, target: &Path, anti: bool) -> Result<Outcome> {
    let phi = input::poly_map(map)?;
    let (pn, pm) = (input::bivector(source)?, input::bivector(target)?);
    let sign = if anti { MapSign::AntiPoisson } else { MapSign::Poisson };
    let defects = poisson_map_defects(&phi, &pn, &pm, sign)?;
    let bad: Vec<String> = defects
        .iter()
        .map(|((a, b), p)| format!("component ({}, {}): {p}", a + 1, b + 1))
        .collect();
    let name = if anti { "anti_poisson_map" } else { "poisson_map" };
    Ok(Outcome::new().criterion(Criterion::exact(name, bad.is_empty(), summarize(bad, 5))))
}
