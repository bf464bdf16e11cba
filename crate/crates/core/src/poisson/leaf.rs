//! Pointwise symplectic leaf data.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::PoissonBivector;
use crate::error::{check_dim, Result};
use crate::numeric::linalg::{column_space, RANK_TOL};

#[derive(Clone, Debug, Serialize)]
pub struct LeafData {
    pub point: Vec<f64>,
    pub rank: usize,
    /// Orthonormal basis of `ran(π♯)`, one vector per entry.
    pub basis: Vec<Vec<f64>>,
    /// `ω_S` on `basis`; `ω_S = −π_S⁻¹` where `π_S = Bᵀ Π B`.
    pub omega: Vec<Vec<f64>>,
    /// Set when the basis is not a subset of the coordinate vectors, so
    /// `omega` depends on an arbitrary choice.
    pub basis_dependent: bool,
}

/// Numeric rank uses singular values above `1e-10 · σ_max`. The basis
/// projects `e_1, e_2, …` onto `ran(π♯)` and orthonormalizes them in order,
/// so it is deterministic and equals a coordinate basis whenever possible.
pub fn leaf_data_at_point(pi: &PoissonBivector, m: &[f64]) -> Result<LeafData> {
    check_dim(pi.dim(), m.len())?;
    let n = pi.dim();
    let p = pi.matrix_at(m);
    let q = column_space(&p, RANK_TOL);
    let r = q.ncols();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(r);
    for i in 0..n {
        if basis.len() == r {
            break;
        }
        let mut v = &q * q.row(i).transpose();
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    let b = DMatrix::from_fn(n, r, |i, j| basis[j][i]);
    let pi_s = b.transpose() * &p * &b;
    let omega = if r == 0 {
        DMatrix::zeros(0, 0)
    } else {
        -pi_s.try_inverse().expect("π is nondegenerate on its own range")
    };
    let basis_dependent = basis
        .iter()
        .any(|v| v.iter().filter(|x| x.abs() > 1e-12).count() != 1);
    Ok(LeafData {
        point: m.to_vec(),
        rank: r,
        basis: basis.iter().map(|v| v.iter().copied().collect()).collect(),
        omega: (0..r).map(|i| omega.row(i).iter().copied().collect()).collect(),
        basis_dependent,
    })
}

impl LeafData {
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.point.len(), self.rank, |i, j| self.basis[j][i])
    }

    pub fn omega_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rank, self.rank, |i, j| self.omega[i][j])
    }
}
