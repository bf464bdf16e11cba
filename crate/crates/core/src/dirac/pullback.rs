//! Pullbacks of Dirac structures at a point, and cosymplectic submanifolds.

use nalgebra::DMatrix;
use serde::Serialize;

use super::frame::LagrangianFrame;
use crate::error::{check_dim, Error, Result};
use crate::fields::SmoothMap;
use crate::numeric::linalg::{column_space, null_space, rank, RANK_TOL};
use crate::poisson::PoissonBivector;

/// `φ^!E` on a single fiber: `{(w, Jᵀμ) : (Jw, μ) ∈ E}` for `E = [V; M]`
/// (`2m × m`) and `J = dφ` (`m × k`). Returns an orthonormal `2k × k` basis.
pub fn pullback_dirac_fiber(e: &DMatrix<f64>, j: &DMatrix<f64>, point: &[f64]) -> Result<DMatrix<f64>> {
    let m = j.nrows();
    let k = j.ncols();
    if e.nrows() != 2 * m || e.ncols() != m {
        return Err(Error::ChartMismatch {
            expected: 2 * m,
            found: e.nrows(),
        });
    }
    let v = e.rows(0, m);
    let mu = e.rows(m, m);
    let mut vj = DMatrix::zeros(m, m + k);
    vj.columns_mut(0, m).copy_from(&v);
    vj.columns_mut(m, k).copy_from(j);
    if rank(&vj, RANK_TOL) < m {
        return Err(Error::Transversality {
            point: point.to_vec(),
            detail: "a(E) + ran(dφ) does not span the tangent space".into(),
        });
    }
    // kernel of [V | −J] in (c, w)
    let mut sys = vj;
    sys.columns_mut(m, k).neg_mut();
    let ker = null_space(&sys, RANK_TOL);
    let c = ker.rows(0, m);
    let w = ker.rows(m, k);
    let mut img = DMatrix::zeros(2 * k, ker.ncols());
    img.rows_mut(0, k).copy_from(&w);
    img.rows_mut(k, k).copy_from(&(j.transpose() * mu * c));
    let basis = column_space(&img, RANK_TOL);
    if basis.ncols() != k {
        return Err(Error::NotLagrangian(format!(
            "pullback has dimension {} instead of {k} at {point:?}",
            basis.ncols()
        )));
    }
    Ok(basis)
}

/// `φ^!E` at `n`, with `E` evaluated at `φ(n)`.
pub fn pullback_dirac_at_point(phi: &dyn SmoothMap, e: &LagrangianFrame, n: &[f64]) -> Result<LagrangianFrame> {
    check_dim(phi.source_dim(), n.len())?;
    check_dim(phi.target_dim(), e.dim())?;
    let image: Vec<f64> = phi.eval(n).iter().copied().collect();
    let fiber = e.fiber(&image)?;
    let basis = pullback_dirac_fiber(&fiber, &phi.jacobian(n), n)?;
    LagrangianFrame::pointwise(n.to_vec(), basis)
}

#[derive(Clone, Debug, Serialize)]
pub struct CosymplecticReport {
    pub holds: bool,
    /// First point where `TM = TN ⊕ π♯(ann TN)` fails.
    pub witness: Option<Vec<f64>>,
    /// Per checked point, a basis of `V = π♯(ann TN)` (one vector per entry).
    pub fibers: Vec<Vec<Vec<f64>>>,
}

/// `N = {x_i = 0 : i ∈ vanishing}`. At each point checks that the columns
/// `e_j (j ∉ vanishing)` together with `π♯(dx_i) (i ∈ vanishing)` span ℝⁿ.
pub fn cosymplectic_check(pi: &PoissonBivector, vanishing: &[usize], points: &[Vec<f64>]) -> Result<CosymplecticReport> {
    let n = pi.dim();
    if let Some(&bad) = vanishing.iter().find(|&&i| i >= n) {
        return Err(Error::Invalid(format!("coordinate {} out of range", bad + 1)));
    }
    let tangent: Vec<usize> = (0..n).filter(|i| !vanishing.contains(i)).collect();
    let mut fibers = Vec::with_capacity(points.len());
    for x in points {
        check_dim(n, x.len())?;
        let p = pi.matrix_at(x);
        let mut cols = DMatrix::zeros(n, n);
        for (c, &j) in tangent.iter().enumerate() {
            cols[(j, c)] = 1.0;
        }
        let mut v = Vec::with_capacity(vanishing.len());
        for (c, &i) in vanishing.iter().enumerate() {
            // π♯(dx_i) = Πᵀ e_i, the i-th row of Π
            let col: Vec<f64> = p.row(i).iter().copied().collect();
            for (r, val) in col.iter().enumerate() {
                cols[(r, tangent.len() + c)] = *val;
            }
            v.push(col);
        }
        if rank(&cols, RANK_TOL) < n {
            return Ok(CosymplecticReport {
                holds: false,
                witness: Some(x.clone()),
                fibers,
            });
        }
        fibers.push(v);
    }
    Ok(CosymplecticReport {
        holds: true,
        witness: None,
        fibers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::frame::gram;
    use crate::dirac::graph_of_poisson;
    use crate::fields::{PolyMap, PolyScalar};
    use crate::numeric::linalg::{max_abs, span_distance};
    use crate::poisson::{lie_poisson, StructureConstants};

    #[test]
    fn identity_pullback_is_the_same_structure() {
        let pi = lie_poisson(&StructureConstants::so3());
        let e = graph_of_poisson(&pi);
        let x = [0.3, -0.2, 0.5];
        let p = pullback_dirac_at_point(&PolyMap::identity(3), &e, &x).unwrap();
        assert!(span_distance(&p.fiber(&x).unwrap(), &e.fiber(&x).unwrap()) < 1e-12);
    }

    #[test]
    fn x_axis_in_the_plane() {
        // ∂x∧∂y pulled back to the x-axis: only (∂x, 0) is related
        let e = graph_of_poisson(&PoissonBivector::standard_symplectic(1));
        let phi = PolyMap::new(1, vec![PolyScalar::var(1, 0), PolyScalar::zero(1)]).unwrap();
        let p = pullback_dirac_at_point(&phi, &e, &[0.7]).unwrap();
        let m = p.fiber(&[0.7]).unwrap();
        assert!(span_distance(&m, &DMatrix::from_column_slice(2, 1, &[1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn cosymplectic_subspace_pulls_back_to_a_graph() {
        // N = μ₃-axis in so(3)*, transverse to the sphere through (0, 0, 1)
        let pi = lie_poisson(&StructureConstants::so3());
        let r = cosymplectic_check(&pi, &[0, 1], &[vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(r.holds);
        assert_eq!(r.fibers[0].len(), 2);
        let e = graph_of_poisson(&pi);
        let phi = PolyMap::new(1, vec![PolyScalar::zero(1), PolyScalar::zero(1), PolyScalar::var(1, 0)]).unwrap();
        let p = pullback_dirac_at_point(&phi, &e, &[1.0]).unwrap();
        assert!(p.transverse_to_tangent(&[1.0]).unwrap());
    }

    #[test]
    fn cosymplectic_trivial_cases() {
        let pi = PoissonBivector::standard_symplectic(2);
        let r = cosymplectic_check(&pi, &[0, 1, 2, 3], &[vec![0.1; 4]]).unwrap();
        assert!(r.holds);
        assert_eq!(r.fibers[0].len(), 4);
        let zero = PoissonBivector::zero(3);
        let r = cosymplectic_check(&zero, &[2], &[vec![0.0; 3]]).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(vec![0.0; 3]));
    }

    #[test]
    fn transversality_failure() {
        // E = T*M pulled back along a non-submersion fails
        let e = graph_of_poisson(&PoissonBivector::zero(2));
        let phi = PolyMap::new(1, vec![PolyScalar::var(1, 0), PolyScalar::zero(1)]).unwrap();
        assert!(matches!(
            pullback_dirac_at_point(&phi, &e, &[0.0]),
            Err(Error::Transversality { .. })
        ));
    }

    #[test]
    fn related_elements_have_equal_pairings() {
        let pi = lie_poisson(&StructureConstants::so3());
        let e = graph_of_poisson(&pi);
        let phi = PolyMap::new(
            2,
            vec![PolyScalar::var(2, 0), PolyScalar::var(2, 1), &PolyScalar::one(2) + &PolyScalar::var(2, 0).pow(2)],
        )
        .unwrap();
        let p = pullback_dirac_at_point(&phi, &e, &[0.2, 0.1]).unwrap();
        assert!(max_abs(&gram(&p.fiber(&[0.2, 0.1]).unwrap())) < 1e-12);
    }
}
