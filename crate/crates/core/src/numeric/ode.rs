//! Fixed-step RK4 with optional variational (tangent) equations.

use nalgebra::{DMatrix, DVector};

/// State and tangent map at one requested time.
#[derive(Clone, Debug)]
pub struct FlowPoint {
    pub time: f64,
    pub state: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

/// Returned when the state leaves the admissible region.
#[derive(Clone, Debug, PartialEq)]
pub struct Escape {
    pub time: f64,
}

/// Integrates `x' = f(t, x)` with `J' = D_x f(t, x) J`, `J(t0) = I`.
///
/// `checkpoints` must be monotone in the direction of integration; each is
/// hit exactly (steps are shortened to land on it). The step count per
/// segment is `ceil(|Δt| / h)`. `inside` is consulted after every step.
pub fn integrate_variational<F>(
    f: F,
    t0: f64,
    x0: &DVector<f64>,
    checkpoints: &[f64],
    h: f64,
    inside: impl Fn(&DVector<f64>) -> bool,
) -> Result<Vec<FlowPoint>, Escape>
where
    F: Fn(f64, &DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    assert!(h > 0.0, "step must be positive");
    let n = x0.len();
    let mut t = t0;
    let mut x = x0.clone();
    let mut j = DMatrix::identity(n, n);
    let mut out = Vec::with_capacity(checkpoints.len());
    for &tc in checkpoints {
        let span = tc - t;
        let steps = (span.abs() / h).ceil().max(if span == 0.0 { 0.0 } else { 1.0 }) as usize;
        let dt = if steps == 0 { 0.0 } else { span / steps as f64 };
        for k in 0..steps {
            let ts = t + k as f64 * dt;
            let (k1, a1) = f(ts, &x);
            let x2 = &x + &k1 * (0.5 * dt);
            let (k2, a2) = f(ts + 0.5 * dt, &x2);
            let x3 = &x + &k2 * (0.5 * dt);
            let (k3, a3) = f(ts + 0.5 * dt, &x3);
            let x4 = &x + &k3 * dt;
            let (k4, a4) = f(ts + dt, &x4);

            let j1 = &a1 * &j;
            let j2 = &a2 * (&j + &j1 * (0.5 * dt));
            let j3 = &a3 * (&j + &j2 * (0.5 * dt));
            let j4 = &a4 * (&j + &j3 * dt);

            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            j += (j1 + j2 * 2.0 + j3 * 2.0 + j4) * (dt / 6.0);
            if !x.iter().all(|v| v.is_finite()) || !inside(&x) {
                return Err(Escape { time: ts + dt });
            }
        }
        t = tc;
        out.push(FlowPoint {
            time: tc,
            state: x.clone(),
            jacobian: j.clone(),
        });
    }
    Ok(out)
}

/// Integrates `x' = f(t, x)` without tangent data.
pub fn integrate<F>(f: F, t0: f64, x0: &DVector<f64>, t1: f64, h: f64) -> DVector<f64>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let span = t1 - t0;
    let steps = (span.abs() / h).ceil() as usize;
    if steps == 0 {
        return x0.clone();
    }
    let dt = span / steps as f64;
    let mut x = x0.clone();
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let k1 = f(t, &x);
        let k2 = f(t + 0.5 * dt, &(&x + &k1 * (0.5 * dt)));
        let k3 = f(t + 0.5 * dt, &(&x + &k2 * (0.5 * dt)));
        let k4 = f(t + dt, &(&x + &k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_and_tangent() {
        // x' = a x: x(t) = e^{at} x0, J = e^{at}
        let a = 0.7;
        let f = |_t: f64, x: &DVector<f64>| (x * a, DMatrix::from_element(1, 1, a));
        let pts = integrate_variational(f, 0.0, &DVector::from_element(1, 2.0), &[0.5, 1.0], 1e-3, |_| true).unwrap();
        assert!((pts[1].state[0] - 2.0 * a.exp()).abs() < 1e-12);
        assert!((pts[1].jacobian[(0, 0)] - a.exp()).abs() < 1e-12);
        assert!((pts[0].state[0] - 2.0 * (0.5 * a).exp()).abs() < 1e-12);
    }

    #[test]
    fn backward_in_time() {
        let f = |t: f64, _x: &DVector<f64>| (DVector::from_element(1, t), DMatrix::zeros(1, 1));
        let pts = integrate_variational(f, 0.0, &DVector::zeros(1), &[-1.0], 1e-2, |_| true).unwrap();
        assert!((pts[0].state[0] - 0.5).abs() < 1e-13);
    }

    #[test]
    fn escape_is_reported() {
        // x' = x², blows up at t = 1 from x0 = 1
        let f = |_t: f64, x: &DVector<f64>| (x.map(|v| v * v), DMatrix::from_element(1, 1, 2.0 * x[0]));
        let r = integrate_variational(f, 0.0, &DVector::from_element(1, 1.0), &[2.0], 1e-3, |x| x.norm() < 1e6);
        assert!(r.unwrap_err().time < 1.01);
    }
}
