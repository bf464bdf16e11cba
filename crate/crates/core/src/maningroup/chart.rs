//! Exponential charts on the group `G` integrating `𝔤`, with `Ad` on `𝔡`.

use nalgebra::{DMatrix, DVector};

use super::ManinTriple;
use crate::error::{Error, Result};
use crate::numeric::linalg::max_abs;

/// Tolerance for `Ad_g` preserving the metric and the bracket.
pub const AD_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum AdRule {
    /// The group is represented on `𝔡` itself by `exp(ad_X)`, which is also `Ad_g`.
    Adjoint,
    /// A faithful matrix representation of `𝔡`; `Ad_g ζ = g ζ g⁻¹`.
    Conjugation { d_rep: Vec<DMatrix<f64>> },
}

/// Point `x ∈ ℝⁿ` ↦ `exp(Σ x_i R_i)` with `R_i` the image of the `i`-th
/// `g`-basis vector.
#[derive(Clone, Debug)]
pub struct GroupChart {
    name: String,
    reps: Vec<DMatrix<f64>>,
    /// Pseudo-inverse of the flattened `R_i`, recovering `g`-coordinates.
    reps_pinv: DMatrix<f64>,
    rule: AdRule,
    d_pinv: Option<DMatrix<f64>>,
    d_dim: usize,
}

fn flatten(ms: &[DMatrix<f64>]) -> DMatrix<f64> {
    let len = ms[0].len();
    DMatrix::from_fn(len, ms.len(), |r, c| ms[c].as_slice()[r])
}

fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().pseudo_inverse(1e-12).expect("SVD of a finite matrix")
}

impl GroupChart {
    /// `Ad_g = exp(ad_X)` on `𝔡`; the group matrices are these operators.
    pub fn adjoint(triple: &ManinTriple, name: impl Into<String>) -> Self {
        let alg = triple.algebra();
        let g = triple.g_basis().to_f64();
        let reps: Vec<DMatrix<f64>> = g.column_iter().map(|col| alg.ad_f64(col.as_slice())).collect();
        Self::build(name.into(), reps, AdRule::Adjoint, alg.dim())
    }

    /// `d_rep[a]` represents the `a`-th basis vector of `𝔡`.
    pub fn conjugation(triple: &ManinTriple, d_rep: Vec<DMatrix<f64>>, name: impl Into<String>) -> Result<Self> {
        let d = triple.algebra().dim();
        if d_rep.len() != d {
            return Err(Error::Chart(format!("need {d} representing matrices, got {}", d_rep.len())));
        }
        let g = triple.g_basis().to_f64();
        let reps: Vec<DMatrix<f64>> = g
            .column_iter()
            .map(|col| col.iter().zip(&d_rep).fold(DMatrix::zeros(d_rep[0].nrows(), d_rep[0].ncols()), |acc, (c, m)| acc + m * *c))
            .collect();
        let chart = Self::build(name.into(), reps, AdRule::Conjugation { d_rep }, d);
        // the representation must be faithful on 𝔡 and a homomorphism
        let flat = flatten(match &chart.rule {
            AdRule::Conjugation { d_rep } => d_rep,
            AdRule::Adjoint => unreachable!(),
        });
        if crate::numeric::linalg::rank(&flat, 1e-12) < d {
            return Err(Error::Chart("the representation of d is not faithful".into()));
        }
        let r = chart.representation_defect(triple);
        if r > AD_TOL {
            return Err(Error::Chart(format!("matrices do not represent the bracket of d (defect {r:e})")));
        }
        Ok(chart)
    }

    fn build(name: String, reps: Vec<DMatrix<f64>>, rule: AdRule, d_dim: usize) -> Self {
        let reps_pinv = pinv(&flatten(&reps));
        let d_pinv = match &rule {
            AdRule::Conjugation { d_rep } => Some(pinv(&flatten(d_rep))),
            AdRule::Adjoint => None,
        };
        GroupChart {
            name,
            reps,
            reps_pinv,
            rule,
            d_pinv,
            d_dim,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn rule(&self) -> &AdRule {
        &self.rule
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::ChartMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    fn generator(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.reps[0].nrows();
        x.iter().zip(&self.reps).fold(DMatrix::zeros(m, m), |acc, (c, r)| acc + r * *c)
    }

    pub fn group_element(&self, x: &[f64]) -> DMatrix<f64> {
        self.generator(x).exp()
    }

    /// `Ad_g` for `g = exp(Σ x_i R_i)`, as a `d × d` matrix.
    pub fn ad(&self, x: &[f64]) -> DMatrix<f64> {
        let g = self.group_element(x);
        match &self.rule {
            AdRule::Adjoint => g,
            AdRule::Conjugation { d_rep } => {
                let ginv = self.group_element(&x.iter().map(|v| -v).collect::<Vec<_>>());
                let pinv = self.d_pinv.as_ref().expect("conjugation charts keep a pseudo-inverse");
                let cols: Vec<DVector<f64>> = d_rep
                    .iter()
                    .map(|m| pinv * DVector::from_column_slice((&g * m * &ginv).as_slice()))
                    .collect();
                DMatrix::from_columns(&cols)
            }
        }
    }

    /// `max` of the metric defect `AdᵀBAd − B` and the bracket defect
    /// `Ad[e_a, e_b] − [Ad e_a, Ad e_b]` at `x`.
    pub fn ad_residual(&self, triple: &ManinTriple, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let alg = triple.algebra();
        if alg.dim() != self.d_dim {
            return Err(Error::ChartMismatch {
                expected: self.d_dim,
                found: alg.dim(),
            });
        }
        let ad = self.ad(x);
        let b = alg.metric_f64();
        let mut worst = max_abs(&(ad.transpose() * &b * &ad - &b));
        let d = alg.dim();
        let e = |a: usize| DVector::from_fn(d, |i, _| if i == a { 1.0 } else { 0.0 });
        for a in 0..d {
            for c in a + 1..d {
                let lhs = &ad * alg.bracket_f64(&e(a), &e(c));
                let rhs = alg.bracket_f64(&ad.column(a).into_owned(), &ad.column(c).into_owned());
                worst = worst.max((lhs - rhs).amax());
            }
        }
        Ok(worst)
    }

    /// `max_ij ‖[R_i, R_j] − Σ_k c_ij^k R_k‖`, with `c` the bracket of `𝔤` in `𝔡`.
    pub fn representation_defect(&self, triple: &ManinTriple) -> f64 {
        let alg = triple.algebra();
        let g = triple.g_basis().to_f64();
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let br = alg.bracket_f64(&g.column(i).into_owned(), &g.column(j).into_owned());
                let (coords, _) = triple.split(&br);
                let lhs = &self.reps[i] * &self.reps[j] - &self.reps[j] * &self.reps[i];
                let rhs = coords.iter().zip(&self.reps).fold(DMatrix::zeros(lhs.nrows(), lhs.ncols()), |acc, (c, r)| acc + r * *c);
                worst = worst.max(max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    /// `∂_i exp(Y)` for `Y = Σ y_k R_k`, from `exp([[Y, R_i], [0, Y]])`.
    fn exp_derivatives(&self, x: &[f64]) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
        let y = self.generator(x);
        let m = y.nrows();
        let mut out = Vec::with_capacity(self.dim());
        let mut g = None;
        for r in &self.reps {
            let mut big = DMatrix::zeros(2 * m, 2 * m);
            big.view_mut((0, 0), (m, m)).copy_from(&y);
            big.view_mut((m, m), (m, m)).copy_from(&y);
            big.view_mut((0, m), (m, m)).copy_from(r);
            let e = big.exp();
            g.get_or_insert_with(|| e.view((0, 0), (m, m)).into_owned());
            out.push(e.view((0, m), (m, m)).into_owned());
        }
        (g.unwrap_or_else(|| y.exp()), out)
    }

    fn g_coordinates(&self, m: &DMatrix<f64>) -> DVector<f64> {
        &self.reps_pinv * DVector::from_column_slice(m.as_slice())
    }

    /// Columns are `θ^L(∂_i) = g⁻¹∂_i g` in `g`-basis coordinates.
    pub fn left_trivialization(&self, x: &[f64]) -> DMatrix<f64> {
        let (g, ds) = self.exp_derivatives(x);
        let ginv = g.try_inverse().expect("exponentials are invertible");
        let cols: Vec<DVector<f64>> = ds.iter().map(|d| self.g_coordinates(&(&ginv * d))).collect();
        DMatrix::from_columns(&cols)
    }

    /// Chart coordinates of `exp(x₁)·exp(x₂)`, by Gauss–Newton from `x₁ + x₂`.
    pub fn multiply(&self, x1: &[f64], x2: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x1)?;
        self.check_point(x2)?;
        let target = self.group_element(x1) * self.group_element(x2);
        let guess: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a + b).collect();
        self.coordinates_of(&target, guess)
    }

    pub fn coordinates_of(&self, target: &DMatrix<f64>, mut y: Vec<f64>) -> Result<Vec<f64>> {
        let scale = target.amax().max(1.0);
        let mut last = f64::INFINITY;
        for _ in 0..60 {
            let (g, ds) = self.exp_derivatives(&y);
            let f = DVector::from_column_slice((&g - target).as_slice());
            let r = f.amax();
            if r <= 1e-15 * scale || (r <= 1e-13 * scale && r >= last) {
                return Ok(y);
            }
            last = r;
            let j = flatten(&ds);
            let step = j
                .svd(true, true)
                .solve(&f, 1e-12)
                .map_err(|e| Error::Chart(format!("singular chart differential: {e}")))?;
            for (yi, si) in y.iter_mut().zip(step.iter()) {
                *yi -= si;
            }
        }
        if last <= 1e-12 * scale {
            return Ok(y);
        }
        Err(Error::Chart(format!("{}: no chart coordinates found (residual {last:e})", self.name)))
    }
}
