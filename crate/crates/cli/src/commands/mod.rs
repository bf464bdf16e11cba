pub mod dirac;
pub mod flows;
pub mod manin;
pub mod poisson;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

/// Settings shared by every command.
#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub tol: Option<f64>,
}

impl Ctx {
    /// The global `--tol` when given, else the command's default.
    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

pub fn matrix(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn vector(v: &DVector<f64>) -> Value {
    json!(v.iter().copied().collect::<Vec<_>>())
}

/// At most `limit` witnesses, joined, with a count of the rest.
pub fn summarize(items: Vec<String>, limit: usize) -> Option<String> {
    if items.is_empty() {
        return None;
    }
    let extra = items.len().saturating_sub(limit);
    let mut s = items.into_iter().take(limit).collect::<Vec<_>>().join("; ");
    if extra > 0 {
        s.push_str(&format!("; and {extra} more"));
    }
    Some(s)
}
