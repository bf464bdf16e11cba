//! Central finite differences.

use nalgebra::{DMatrix, DVector};

/// Default step for every finite-difference derivative.
pub const STEP: f64 = 1e-5;

/// Second-order central-difference jacobian of `f` at `x`.
pub fn jacobian(f: impl Fn(&[f64]) -> DVector<f64>, x: &[f64], h: f64) -> DMatrix<f64> {
    let mut y = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        y[j] = x[j] + h;
        let fp = f(&y);
        y[j] = x[j] - h;
        let fm = f(&y);
        y[j] = x[j];
        cols.push((fp - fm) / (2.0 * h));
    }
    DMatrix::from_columns(&cols)
}

/// Fourth-order central-difference jacobian.
pub fn jacobian4(f: impl Fn(&[f64]) -> DVector<f64>, x: &[f64], h: f64) -> DMatrix<f64> {
    let mut y = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let mut at = |s: f64| {
            y[j] = x[j] + s * h;
            let v = f(&y);
            y[j] = x[j];
            v
        };
        let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
        cols.push(((p1 - m1) * 8.0 - (p2 - m2)) / (12.0 * h));
    }
    DMatrix::from_columns(&cols)
}

/// Lie bracket `[A, B](x) = DB·A − DA·B` of numerically given vector fields.
pub fn lie_bracket(
    a: impl Fn(&[f64]) -> DVector<f64>,
    b: impl Fn(&[f64]) -> DVector<f64>,
    x: &[f64],
    h: f64,
) -> DVector<f64> {
    let da = jacobian(&a, x, h);
    let db = jacobian(&b, x, h);
    db * a(x) - da * b(x)
}
