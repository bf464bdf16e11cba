use nalgebra::{DMatrix, DVector};

use super::poly::{NumPoly, PolyScalar};
use crate::error::{check_dim, Error, Result};

/// Coordinate chart ℝⁿ with display names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn standard(dim: usize) -> Self {
        Chart {
            names: (1..=dim).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Invalid("chart needs at least one coordinate".into()));
        }
        let mut sorted = names.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("coordinate names must be unique".into()));
        }
        Ok(Chart { names })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A smooth map between charts, evaluated numerically.
pub trait SmoothMap: Sync {
    fn source_dim(&self) -> usize;
    fn target_dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> DVector<f64>;
    /// `target_dim × source_dim` jacobian.
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64>;
}

/// Polynomial map `ℝⁿ → ℝᵐ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    source: usize,
    comps: Vec<PolyScalar>,
    jac: Vec<Vec<PolyScalar>>,
}

impl PolyMap {
    pub fn new(source: usize, comps: Vec<PolyScalar>) -> Result<Self> {
        for c in &comps {
            check_dim(source, c.nvars())?;
        }
        let jac = comps
            .iter()
            .map(|c| (0..source).map(|j| c.derivative(j)).collect())
            .collect();
        Ok(PolyMap { source, comps, jac })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| PolyScalar::var(n, i)).collect()).unwrap()
    }

    pub fn components(&self) -> &[PolyScalar] {
        &self.comps
    }

    /// Symbolic jacobian, `jacobian_poly()[a][j] = ∂φ^a/∂x_j`.
    pub fn jacobian_poly(&self) -> &[Vec<PolyScalar>] {
        &self.jac
    }

    /// Numeric version for hot loops.
    pub fn compile(&self) -> CompiledMap {
        CompiledMap {
            source: self.source,
            comps: self.comps.iter().map(PolyScalar::compile).collect(),
            jac: self.jac.iter().map(|r| r.iter().map(PolyScalar::compile).collect()).collect(),
        }
    }
}

impl SmoothMap for PolyMap {
    fn source_dim(&self) -> usize {
        self.source
    }

    fn target_dim(&self) -> usize {
        self.comps.len()
    }

    fn eval(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(|c| c.eval(x)))
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.comps.len(), self.source, |a, j| self.jac[a][j].eval(x))
    }
}

/// Float copy of a [`PolyMap`] with its jacobian.
#[derive(Clone, Debug)]
pub struct CompiledMap {
    source: usize,
    comps: Vec<NumPoly>,
    jac: Vec<Vec<NumPoly>>,
}

impl SmoothMap for CompiledMap {
    fn source_dim(&self) -> usize {
        self.source
    }

    fn target_dim(&self) -> usize {
        self.comps.len()
    }

    fn eval(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(|c| c.eval(x)))
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.comps.len(), self.source, |a, j| self.jac[a][j].eval(x))
    }
}

type MapFn = Box<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
type JacFn = Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Map given by closures, for non-polynomial maps such as `exp`.
///
/// Without an explicit jacobian, central differences with step `1e-5` are used.
pub struct CallbackMap {
    source: usize,
    target: usize,
    f: MapFn,
    jac: Option<JacFn>,
}

impl CallbackMap {
    pub fn new(
        source: usize,
        target: usize,
        f: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        CallbackMap {
            source,
            target,
            f: Box::new(f),
            jac: None,
        }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.jac = Some(Box::new(jac));
        self
    }
}

impl SmoothMap for CallbackMap {
    fn source_dim(&self) -> usize {
        self.source
    }

    fn target_dim(&self) -> usize {
        self.target
    }

    fn eval(&self, x: &[f64]) -> DVector<f64> {
        (self.f)(x)
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        match &self.jac {
            Some(j) => j(x),
            None => crate::numeric::fd::jacobian(|y| (self.f)(y), x, crate::numeric::fd::STEP),
        }
    }
}

/// `(T_pφ) v`.
pub fn pushforward_vector_at_point(phi: &dyn SmoothMap, p: &[f64], v: &[f64]) -> Result<DVector<f64>> {
    check_dim(phi.source_dim(), p.len())?;
    check_dim(phi.source_dim(), v.len())?;
    Ok(phi.jacobian(p) * DVector::from_column_slice(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pushforward_by_square() {
        let u = PolyScalar::var(1, 0);
        let phi = PolyMap::new(1, vec![u.pow(2), u.clone()]).unwrap();
        let w = pushforward_vector_at_point(&phi, &[3.0], &[1.0]).unwrap();
        assert_eq!(w.as_slice(), &[6.0, 1.0]);
    }

    #[test]
    fn callback_jacobian_by_differences() {
        let m = CallbackMap::new(2, 1, |x| DVector::from_element(1, x[0] * x[1].exp()));
        let j = m.jacobian(&[2.0, 0.5]);
        assert!((j[(0, 0)] - 0.5f64.exp()).abs() < 1e-9);
        assert!((j[(0, 1)] - 2.0 * 0.5f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn chart_names_unique() {
        assert!(Chart::new(vec!["x".into(), "x".into()]).is_err());
        assert_eq!(Chart::standard(3).names()[2], "x3");
    }
}
