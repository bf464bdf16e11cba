//! Poisson and anti-Poisson maps: `dφ ∘ π_N♯ ∘ dφᵀ = ±π_M♯ ∘ φ`.

use rayon::prelude::*;

use crate::error::{check_dim, Result};
use crate::fields::{PolyMap, PolyScalar, SmoothMap};
use crate::numeric::linalg::max_abs;
use crate::poisson::PoissonBivector;
use crate::report::ResidualReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSign {
    Poisson,
    AntiPoisson,
}

/// Nonzero components `(a, b)`, `a < b`, of `J Π_N Jᵀ ∓ Π_M ∘ φ`.
pub fn poisson_map_defects(
    phi: &PolyMap,
    pi_n: &PoissonBivector,
    pi_m: &PoissonBivector,
    sign: MapSign,
) -> Result<Vec<((usize, usize), PolyScalar)>> {
    check_dim(pi_n.dim(), phi.source_dim())?;
    check_dim(pi_m.dim(), phi.target_dim())?;
    let m = pi_m.dim();
    let comps = phi.components();
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            // {φ_a, φ_b}_N
            let lhs = pi_n.bracket(&comps[a], &comps[b])?;
            let rhs = pi_m.entry(a, b).compose(comps);
            let defect = match sign {
                MapSign::Poisson => &lhs - &rhs,
                MapSign::AntiPoisson => &lhs + &rhs,
            };
            if !defect.is_zero() {
                out.push(((a, b), defect));
            }
        }
    }
    Ok(out)
}

/// Exact check for polynomial maps.
pub fn check_poisson_map(phi: &PolyMap, pi_n: &PoissonBivector, pi_m: &PoissonBivector, sign: MapSign) -> Result<bool> {
    Ok(poisson_map_defects(phi, pi_n, pi_m, sign)?.is_empty())
}

/// Sampled check `‖J Π_N Jᵀ ∓ Π_M(φ(x))‖_max` for any smooth map.
pub fn check_poisson_map_numeric(
    phi: &dyn SmoothMap,
    pi_n: &PoissonBivector,
    pi_m: &PoissonBivector,
    points: &[Vec<f64>],
    sign: MapSign,
) -> Result<ResidualReport> {
    check_dim(pi_n.dim(), phi.source_dim())?;
    check_dim(pi_m.dim(), phi.target_dim())?;
    for p in points {
        check_dim(pi_n.dim(), p.len())?;
    }
    let s = match sign {
        MapSign::Poisson => 1.0,
        MapSign::AntiPoisson => -1.0,
    };
    let residuals: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let j = phi.jacobian(x);
            let y: Vec<f64> = phi.eval(x).iter().copied().collect();
            let pushed = &j * pi_n.matrix_at(x) * j.transpose();
            max_abs(&(pushed - pi_m.matrix_at(&y) * s))
        })
        .collect();
    Ok(ResidualReport::from_samples(points.iter().cloned().zip(residuals)))
}
