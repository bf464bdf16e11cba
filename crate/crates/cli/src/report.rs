//! The `diraclab.report/v1` certificate printed by every command.

use diraclab::report::ResidualReport;
use serde::ser::Serializer;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "diraclab.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Either a measured residual or the outcome of an exact symbolic check.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Exact { zero: bool },
    Numeric(f64),
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Residual::Exact { zero: true } => s.serialize_str("exact-zero"),
            Residual::Exact { zero: false } => s.serialize_str("exact-nonzero"),
            // JSON has no infinities; null marks a residual that is not finite
            Residual::Numeric(v) if !v.is_finite() => s.serialize_none(),
            Residual::Numeric(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub name: String,
    pub status: Status,
    pub max_residual: Residual,
    pub worst_point: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Criterion {
    pub fn exact(name: &str, holds: bool, witness: Option<String>) -> Self {
        Criterion {
            name: name.into(),
            status: if holds { Status::Pass } else { Status::Fail },
            max_residual: Residual::Exact { zero: holds },
            worst_point: None,
            tolerance: None,
            samples: None,
            witness,
        }
    }

    pub fn numeric(name: &str, r: &ResidualReport, tol: f64) -> Self {
        let mut c = Self::value(name, r.max_residual, r.worst_point.clone(), tol);
        c.samples = Some(r.samples);
        c
    }

    /// Passes iff `residual ≤ tol`; NaN and infinities fail.
    pub fn value(name: &str, residual: f64, worst_point: Option<Vec<f64>>, tol: f64) -> Self {
        Criterion {
            name: name.into(),
            status: if residual <= tol { Status::Pass } else { Status::Fail },
            max_residual: Residual::Numeric(residual),
            worst_point,
            tolerance: Some(tol),
            samples: None,
            witness: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Vec<String>,
    pub seed: u64,
    pub status: Status,
    pub criteria: Vec<Criterion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Only with `--timing`, so reports stay byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// What a command hands back before the envelope is filled in.
#[derive(Debug, Default)]
pub struct Outcome {
    pub criteria: Vec<Criterion>,
    pub data: Option<Value>,
}

impl Outcome {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn criterion(mut self, c: Criterion) -> Self {
        self.criteria.push(c);
        self
    }

    pub fn data(mut self, v: Value) -> Self {
        self.data = Some(v);
        self
    }
}

impl Report {
    pub fn finish(command: Vec<String>, seed: u64, outcome: anyhow::Result<Outcome>) -> Self {
        match outcome {
            Ok(o) => {
                let status = if o.criteria.iter().all(|c| c.status == Status::Pass) {
                    Status::Pass
                } else {
                    Status::Fail
                };
                Report {
                    schema: SCHEMA,
                    command,
                    seed,
                    status,
                    criteria: o.criteria,
                    data: o.data,
                    error: None,
                    wall_time: None,
                }
            }
            Err(e) => Report {
                schema: SCHEMA,
                command,
                seed,
                status: Status::Error,
                criteria: Vec::new(),
                data: None,
                error: Some(format!("{e:#}")),
                wall_time: None,
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_markers() {
        let j = |r: Residual| serde_json::to_string(&r).unwrap();
        assert_eq!(j(Residual::Exact { zero: true }), "\"exact-zero\"");
        assert_eq!(j(Residual::Numeric(f64::INFINITY)), "null");
        assert_eq!(j(Residual::Numeric(0.5)), "0.5");
    }

    #[test]
    fn tolerance_is_inclusive_and_nan_fails() {
        assert_eq!(Criterion::value("a", 1e-6, None, 1e-6).status, Status::Pass);
        assert_eq!(Criterion::value("a", f64::NAN, None, 1.0).status, Status::Fail);
    }

    #[test]
    fn exit_codes() {
        let pass = Report::finish(vec![], 0, Ok(Outcome::new()));
        assert_eq!(pass.exit_code(), 0);
        let fail = Report::finish(vec![], 0, Ok(Outcome::new().criterion(Criterion::exact("x", false, None))));
        assert_eq!(fail.exit_code(), 1);
        let err = Report::finish(vec![], 0, Err(anyhow::anyhow!("bad input")));
        assert_eq!(err.exit_code(), 2);
    }
}
