//! Lagrangian frames: Dirac structures presented by `n` spanning sections.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{courant_bracket, pairing, GeneralizedSection};
use crate::error::{check_dim, Error, Result};
use crate::fields::json::TensorJson;
use crate::fields::{PolyKForm, PolyKVector, PolyScalar};
use crate::numeric::linalg::{max_abs, rank, RANK_TOL};
use crate::poisson::PoissonBivector;

/// Numeric Lagrangian test: rank `n` and vanishing Gram matrix.
const GRAM_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
enum FrameData {
    Symbolic(Vec<GeneralizedSection>),
    /// `2n × n` fiber matrix at one point, vector parts in the top rows.
    Pointwise { point: Vec<f64>, matrix: DMatrix<f64> },
}

#[derive(Clone, Debug)]
pub struct LagrangianFrame {
    dim: usize,
    data: FrameData,
}

/// Split-signature Gram matrix `Fᵀ G F` with `G = [[0, I], [I, 0]]`.
pub(crate) fn gram(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() / 2;
    let v = m.rows(0, n);
    let f = m.rows(n, n);
    v.transpose() * f + f.transpose() * v
}

impl LagrangianFrame {
    /// Isotropy is checked exactly; the rank condition is checked pointwise.
    pub fn symbolic(sections: Vec<GeneralizedSection>) -> Result<Self> {
        let n = sections.first().map(GeneralizedSection::dim).unwrap_or(0);
        check_dim(n, sections.len())?;
        for s in &sections {
            check_dim(n, s.dim())?;
        }
        for i in 0..n {
            for j in i..n {
                if !pairing(&sections[i], &sections[j])?.is_zero() {
                    return Err(Error::NotLagrangian(format!(
                        "sections {} and {} pair nontrivially",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(LagrangianFrame {
            dim: n,
            data: FrameData::Symbolic(sections),
        })
    }

    pub fn pointwise(point: Vec<f64>, matrix: DMatrix<f64>) -> Result<Self> {
        let n = point.len();
        if matrix.nrows() != 2 * n || matrix.ncols() != n {
            return Err(Error::Invalid(format!(
                "a fiber frame on a {n}-dimensional chart must be {}×{n}, got {}×{}",
                2 * n,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_lagrangian(&matrix, &point)?;
        Ok(LagrangianFrame {
            dim: n,
            data: FrameData::Pointwise { point, matrix },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sections(&self) -> Option<&[GeneralizedSection]> {
        match &self.data {
            FrameData::Symbolic(s) => Some(s),
            FrameData::Pointwise { .. } => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.data, FrameData::Symbolic(_))
    }

    /// The `2n × n` fiber matrix at `point`, without checks.
    pub fn matrix_at(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.dim, point.len())?;
        match &self.data {
            FrameData::Symbolic(s) => {
                let cols: Vec<_> = s.iter().map(|s| s.eval(point)).collect();
                Ok(DMatrix::from_columns(&cols))
            }
            FrameData::Pointwise { point: p, matrix } => {
                if p.iter().zip(point).any(|(a, b)| (a - b).abs() > 1e-12) {
                    return Err(Error::Invalid(format!("frame is only known at {p:?}, asked at {point:?}")));
                }
                Ok(matrix.clone())
            }
        }
    }

    /// The fiber at `point`, checked to be Lagrangian.
    pub fn fiber(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.matrix_at(point)?;
        check_lagrangian(&m, point)?;
        Ok(m)
    }

    pub fn is_lagrangian_at(&self, point: &[f64]) -> bool {
        self.fiber(point).is_ok()
    }

    /// Transverse to `TM` at `point`, i.e. the graph of a bivector there.
    pub fn transverse_to_tangent(&self, point: &[f64]) -> Result<bool> {
        let m = self.matrix_at(point)?;
        let forms = m.rows(self.dim, self.dim).into_owned();
        Ok(rank(&forms, RANK_TOL) == self.dim)
    }

    pub fn to_json(&self) -> Result<FrameJson> {
        let s = self
            .sections()
            .ok_or_else(|| Error::Invalid("only symbolic frames have a JSON form".into()))?;
        Ok(s.iter()
            .map(|s| SectionJson {
                vector: s.anchor().to_json(),
                form: s.form_part().to_json(),
            })
            .collect())
    }

    pub fn from_json(j: &FrameJson) -> Result<Self> {
        let sections = j
            .iter()
            .map(|s| GeneralizedSection::new(PolyKVector::from_json(&s.vector)?, PolyKForm::from_json(&s.form)?))
            .collect::<Result<Vec<_>>>()?;
        Self::symbolic(sections)
    }
}

fn check_lagrangian(m: &DMatrix<f64>, point: &[f64]) -> Result<()> {
    let n = m.ncols();
    let r = rank(m, RANK_TOL);
    if r != n {
        return Err(Error::NotLagrangian(format!("rank {r} < {n} at {point:?}")));
    }
    let g = max_abs(&gram(m));
    // scale-aware: compare to the size of the frame itself
    let scale = max_abs(m).max(1.0);
    if g > GRAM_TOL * scale * scale {
        return Err(Error::NotLagrangian(format!("Gram matrix has entry {g:e} at {point:?}")));
    }
    Ok(())
}

/// One record per section, both parts in the fields tensor format.
pub type FrameJson = Vec<SectionJson>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionJson {
    pub vector: TensorJson,
    pub form: TensorJson,
}

/// `Gr(π)`, spanned by `π♯(dx_i) + dx_i`.
pub fn graph_of_poisson(pi: &PoissonBivector) -> LagrangianFrame {
    let n = pi.dim();
    let sections = (0..n)
        .map(|i| {
            let dxi = PolyKForm::from_components(n, 1, [(vec![i], PolyScalar::one(n))]);
            GeneralizedSection::new(pi.sharp(&dxi), dxi).unwrap()
        })
        .collect();
    LagrangianFrame::symbolic(sections).expect("graphs of bivectors are isotropic")
}

/// `Gr(ω)`, spanned by `∂_i + ι_{∂_i}ω`.
pub fn graph_of_form(omega: &PolyKForm) -> Result<LagrangianFrame> {
    if omega.degree() != 2 {
        return Err(Error::Degree("expected a 2-form".into()));
    }
    let n = omega.dim();
    let sections = (0..n)
        .map(|i| {
            let di = PolyKVector::from_components(n, 1, [(vec![i], PolyScalar::one(n))]);
            let a = omega.interior(&di)?;
            GeneralizedSection::new(di, a)
        })
        .collect::<Result<Vec<_>>>()?;
    LagrangianFrame::symbolic(sections)
}

/// A dense `n × n × n` array.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tensor3 {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

/// `Υ_E(σ_i, σ_j, σ_k) = ⟨σ_i, ⟦σ_j, σ_k⟧⟩` for `i < j < k`, exactly.
pub fn integrability_tensor_exact(e: &LagrangianFrame) -> Result<BTreeMap<(usize, usize, usize), PolyScalar>> {
    let s = e
        .sections()
        .ok_or_else(|| Error::Invalid("the integrability tensor needs a symbolic frame".into()))?;
    let n = s.len();
    let mut out = BTreeMap::new();
    for j in 0..n {
        for k in j + 1..n {
            let b = courant_bracket(&s[j], &s[k])?;
            for (i, si) in s.iter().enumerate().take(j) {
                out.insert((i, j, k), pairing(si, &b)?);
            }
        }
    }
    Ok(out)
}

/// All `n³` entries of `Υ_E` at `point`, filled by antisymmetry.
pub fn integrability_tensor(e: &LagrangianFrame, point: &[f64]) -> Result<Tensor3> {
    e.fiber(point)?;
    let n = e.dim();
    let exact = integrability_tensor_exact(e)?;
    let mut data = vec![0.0; n * n * n];
    let mut set = |a: usize, b: usize, c: usize, v: f64| data[(a * n + b) * n + c] = v;
    for (&(i, j, k), p) in &exact {
        let v = p.eval(point);
        set(i, j, k, v);
        set(j, k, i, v);
        set(k, i, j, v);
        set(j, i, k, -v);
        set(i, k, j, -v);
        set(k, j, i, -v);
    }
    Ok(Tensor3 { n, data })
}
