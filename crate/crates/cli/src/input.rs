//! File loaders. Parse failures name the file, line and column.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use diraclab::dirac::{FrameJson, LagrangianFrame};
use diraclab::fields::json::{poly_from_json, MapJson, TensorJson, TermJson};
use diraclab::fields::{PolyKForm, PolyKVector, PolyMap, PolyScalar};
use diraclab::maningroup::{builtin, AdRule, GroupChart, ManinTriple, TripleJson};
use diraclab::poisson::PoissonBivector;

pub fn json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), e))
}

fn in_file<T>(path: &Path, r: diraclab::Result<T>) -> Result<T> {
    r.with_context(|| format!("in {}", path.display()))
}

pub fn vector_tensor(path: &Path, degree: usize) -> Result<PolyKVector> {
    let t = in_file(path, PolyKVector::from_json(&json::<TensorJson>(path)?))?;
    if t.degree() != degree {
        bail!("{}: expected a degree-{degree} multivector, found degree {}", path.display(), t.degree());
    }
    Ok(t)
}

pub fn form(path: &Path) -> Result<PolyKForm> {
    in_file(path, PolyKForm::from_json(&json::<TensorJson>(path)?))
}

pub fn bivector(path: &Path) -> Result<PoissonBivector> {
    in_file(path, PoissonBivector::new(vector_tensor(path, 2)?))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarJson {
    Tensor(TensorJson),
    Terms(Vec<TermJson>),
}

/// A function as a degree-0 tensor record or a bare term list on `nvars` variables.
pub fn scalar(path: &Path, nvars: usize) -> Result<PolyScalar> {
    match json::<ScalarJson>(path)? {
        ScalarJson::Terms(t) => in_file(path, poly_from_json(nvars, &t)),
        ScalarJson::Tensor(t) => {
            if t.degree != 0 {
                bail!("{}: expected a function (degree 0), found degree {}", path.display(), t.degree);
            }
            let s = if t.kind == "form" {
                in_file(path, PolyKForm::from_json(&t))?.as_scalar()
            } else {
                in_file(path, PolyKVector::from_json(&t))?.as_scalar()
            };
            if s.nvars() != nvars {
                bail!("{}: function lives on {} variables, expected {nvars}", path.display(), s.nvars());
            }
            Ok(s)
        }
    }
}

pub fn poly_map(path: &Path) -> Result<PolyMap> {
    in_file(path, PolyMap::from_json(&json::<MapJson>(path)?))
}

pub fn frame(path: &Path) -> Result<LagrangianFrame> {
    in_file(path, LagrangianFrame::from_json(&json::<FrameJson>(path)?))
}

/// A triple with its chart. A file naming `builtin_ad` borrows that
/// built-in's representation; otherwise the group acts on `𝔡` by `exp(ad)`.
pub fn triple(builtin_name: Option<&str>, file: Option<&Path>) -> Result<(ManinTriple, GroupChart)> {
    match (builtin_name, file) {
        (Some(name), None) => {
            let b = builtin(name).ok_or_else(|| {
                anyhow!("unknown built-in triple {name:?}; known: {}", diraclab::maningroup::BUILTIN_NAMES.join(", "))
            })?;
            Ok((b.triple, b.chart))
        }
        (None, Some(path)) => {
            let j: TripleJson = json(path)?;
            let t = in_file(path, ManinTriple::from_json(&j))?;
            let chart = match &j.builtin_ad {
                None => GroupChart::adjoint(&t, "adjoint"),
                Some(name) => {
                    let b = builtin(name).ok_or_else(|| anyhow!("{}: unknown builtin_ad {name:?}", path.display()))?;
                    match b.chart.rule() {
                        AdRule::Adjoint => GroupChart::adjoint(&t, name.as_str()),
                        AdRule::Conjugation { d_rep } => {
                            in_file(path, GroupChart::conjugation(&t, d_rep.clone(), name.as_str()))?
                        }
                    }
                }
            };
            Ok((t, chart))
        }
        _ => bail!("give exactly one of --builtin and --triple"),
    }
}

/// Parses `"a,b,c"` (also accepts `"[a, b, c]"`).
pub fn point(s: &str) -> Result<Vec<f64>> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    if t.trim().is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("not a number: {v:?} in {s:?}")))
        .collect()
}

pub fn expect_len(what: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        bail!("{what} must have {n} coordinates, got {}", v.len());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(point("1, -2.5,3e-1").unwrap(), vec![1.0, -2.5, 0.3]);
        assert_eq!(point("[0.5]").unwrap(), vec![0.5]);
        assert!(point("1,x").is_err());
    }

    #[test]
    fn malformed_json_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        std::fs::write(&p, "{\n  \"chart\": 2,\n  \"degree\": oops\n}").unwrap();
        let e = bivector(&p).unwrap_err().to_string();
        assert!(e.contains("bad.json:3:"), "{e}");
    }
}
