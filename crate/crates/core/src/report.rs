//! Sampled residual summaries shared by the numeric verifiers.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub samples: usize,
}

impl ResidualReport {
    pub fn empty() -> Self {
        ResidualReport {
            max_residual: 0.0,
            worst_point: None,
            samples: 0,
        }
    }

    /// Max-reduction in input order; the first of equal maxima wins, so the
    /// result does not depend on how the samples were computed. NaN counts
    /// as infinitely bad.
    pub fn from_samples<I>(samples: I) -> Self
    where
        I: IntoIterator<Item = (Vec<f64>, f64)>,
    {
        let mut out = Self::empty();
        for (p, r) in samples {
            out.push(p, r);
        }
        out
    }

    pub fn push(&mut self, point: Vec<f64>, residual: f64) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual.abs() };
        if self.worst_point.is_none() || r > self.max_residual {
            self.max_residual = r;
            self.worst_point = Some(point);
        }
        self.samples += 1;
    }

    pub fn merge(mut self, other: ResidualReport) -> Self {
        if let Some(p) = other.worst_point {
            let n = self.samples + other.samples;
            self.push(p, other.max_residual);
            self.samples = n;
        }
        self
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }
}
