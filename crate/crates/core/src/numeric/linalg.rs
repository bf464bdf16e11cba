//! Dense float linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

/// Relative singular-value threshold used for numeric rank.
pub const RANK_TOL: f64 = 1e-10;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numeric rank: singular values above `rel · σ_max`.
pub fn rank(m: &DMatrix<f64>, rel: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&v| v > rel * top).count(),
        _ => 0,
    }
}

/// `σ_max / σ_min` of a square matrix (infinite when singular).
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if b > 0.0 => a / b,
        _ => f64::INFINITY,
    }
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let top = svd.singular_values.iter().fold(0.0f64, |a, &v| a.max(v));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > rel * top)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn null_space(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let c = m.ncols();
    // Pad to a square matrix so the SVD returns a full right factor.
    let rows = m.nrows().max(c);
    let mut sq = DMatrix::zeros(rows, c);
    sq.view_mut((0, 0), (m.nrows(), c)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.unwrap();
    let top = svd.singular_values.iter().fold(0.0f64, |a, &v| a.max(v));
    let kernel: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top == 0.0 || svd.singular_values[i] <= rel * top)
        .collect();
    DMatrix::from_fn(c, kernel.len(), |i, j| vt[(kernel[j], i)])
}

/// Largest entry of the components of each subspace orthogonal to the other.
/// Zero exactly when the column spans agree.
pub fn span_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = column_space(a, RANK_TOL);
    let qb = column_space(b, RANK_TOL);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    let ra = &qa - &qb * (qb.transpose() * &qa);
    let rb = &qb - &qa * (qa.transpose() * &qb);
    max_abs(&ra).max(max_abs(&rb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert_eq!(rank(&m, RANK_TOL), 1);
        let k = null_space(&m, RANK_TOL);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&m * &k)) < 1e-12);
    }

    #[test]
    fn spans_compare_independently_of_basis() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, -1.0, 0.0, 0.0]);
        assert!(span_distance(&a, &b) < 1e-14);
        let c = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(span_distance(&a, &c) > 0.5);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank(&DMatrix::zeros(3, 3), RANK_TOL), 0);
        assert_eq!(null_space(&DMatrix::zeros(2, 2), RANK_TOL).ncols(), 2);
    }
}
