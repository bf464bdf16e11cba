//! Built-in Manin triples with their group charts.

use nalgebra::DMatrix;
use num_traits::Zero;

use super::{GroupChart, ManinTriple, MetrizedLieAlgebra};
use crate::exact::RatMatrix;
use crate::fields::{rat, ratio, Rational};
use crate::poisson::StructureConstants;

#[derive(Clone, Debug)]
pub struct BuiltinTriple {
    pub name: &'static str,
    pub triple: ManinTriple,
    pub chart: GroupChart,
}

fn unit(d: usize, i: usize) -> Vec<Rational> {
    (0..d).map(|k| rat((k == i) as i64)).collect()
}

fn combo(d: usize, terms: &[(usize, i64)]) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    for &(i, c) in terms {
        v[i] += rat(c);
    }
    v
}

/// `(𝔤 ⋉ 𝔤*, 𝔤, 𝔤*)` with the coadjoint action and the pairing as metric.
pub fn semidirect(c: &StructureConstants) -> ManinTriple {
    let m = c.dim();
    let mut entries = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let v = c.get(i, j, k);
                if v.is_zero() {
                    continue;
                }
                // [e_i, e_j] = c_ij^k e_k
                entries.push(((i, j, k), v.clone()));
                // [e_i, f_k] = −Σ_j c_ij^k f_j
                entries.push(((i, m + k, m + j), -v));
            }
        }
    }
    let b = RatMatrix::from_fn(2 * m, 2 * m, |i, j| rat((i + m == j || j + m == i) as i64));
    let d = MetrizedLieAlgebra::from_sparse(2 * m, entries, b).expect("coadjoint semidirect product is metrized");
    let g = RatMatrix::from_columns(2 * m, &(0..m).map(|i| unit(2 * m, i)).collect::<Vec<_>>());
    let h = RatMatrix::from_columns(2 * m, &(m..2 * m).map(|i| unit(2 * m, i)).collect::<Vec<_>>());
    ManinTriple::new(d, g, h).expect("semidirect triple")
}

/// `(𝔡 ⊕ 𝔡̄, 𝔡_Δ, 𝔤 ⊕ 𝔥)`.
pub fn double(t: &ManinTriple) -> ManinTriple {
    let d = t.algebra().dim();
    let big = t.algebra().with_opposite();
    let diag: Vec<Vec<Rational>> = (0..d).map(|i| combo(2 * d, &[(i, 1), (d + i, 1)])).collect();
    let lift = |m: &RatMatrix, offset: usize| -> Vec<Vec<Rational>> {
        m.columns()
            .into_iter()
            .map(|col| {
                let mut v = vec![Rational::zero(); 2 * d];
                for (i, c) in col.into_iter().enumerate() {
                    v[offset + i] = c;
                }
                v
            })
            .collect()
    };
    let mut gh = lift(t.g_basis(), 0);
    gh.extend(lift(t.h_basis(), d));
    ManinTriple::new(big, RatMatrix::from_columns(2 * d, &diag), RatMatrix::from_columns(2 * d, &gh))
        .expect("Drinfeld double")
}

/// Real `4 × 4` image of a complex `2 × 2` matrix given by `(re, im)` entries.
fn complex2(z: [[(i64, i64); 2]; 2]) -> RatMatrix {
    RatMatrix::from_fn(4, 4, |r, c| {
        let (a, b) = z[r / 2][c / 2];
        rat(match (r % 2, c % 2) {
            (0, 0) | (1, 1) => a,
            (0, 1) => -b,
            _ => b,
        })
    })
}

fn trace(m: &RatMatrix) -> Rational {
    (0..m.nrows()).fold(Rational::zero(), |acc, i| acc + &m[(i, i)])
}

fn f64_reps(basis: &[RatMatrix]) -> Vec<DMatrix<f64>> {
    basis.iter().map(RatMatrix::to_f64).collect()
}

/// `(𝔰𝔩(2,ℂ), 𝔰𝔲(2), 𝔞 ⊕ 𝔫)` with `⟨x, y⟩ = Im(−tr xy)`.
fn iwasawa_su2() -> BuiltinTriple {
    let o = (0, 0);
    let basis = vec![
        complex2([[(0, 1), o], [o, (0, -1)]]),
        complex2([[o, (1, 0)], [(-1, 0), o]]),
        complex2([[o, (0, 1)], [(0, 1), o]]),
        complex2([[(1, 0), o], [o, (-1, 0)]]),
        complex2([[o, (1, 0)], [o, o]]),
        complex2([[o, (0, 1)], [o, o]]),
    ];
    let j = complex2([[(0, 1), o], [o, (0, 1)]]);
    // Im(−tr_ℂ Z) = ½ tr(J·Z) in the real picture
    let d = MetrizedLieAlgebra::from_matrices(&basis, |x, y| trace(&(&j * &(x * y))) * ratio(1, 2))
        .expect("sl(2,C) with the imaginary part of the trace form");
    let g = RatMatrix::from_columns(6, &(0..3).map(|i| unit(6, i)).collect::<Vec<_>>());
    let h = RatMatrix::from_columns(6, &(3..6).map(|i| unit(6, i)).collect::<Vec<_>>());
    let triple = ManinTriple::new(d, g, h).expect("Iwasawa triple");
    let chart = GroupChart::conjugation(&triple, f64_reps(&basis), "SU(2)").expect("faithful");
    BuiltinTriple {
        name: "iwasawa_su2",
        triple,
        chart,
    }
}

fn sl2_block(which: usize, m: [[i64; 2]; 2]) -> RatMatrix {
    RatMatrix::from_fn(4, 4, |r, c| {
        if r / 2 == which && c / 2 == which {
            rat(m[r % 2][c % 2])
        } else {
            Rational::zero()
        }
    })
}

const H: [[i64; 2]; 2] = [[1, 0], [0, -1]];
const E: [[i64; 2]; 2] = [[0, 1], [0, 0]];
const F: [[i64; 2]; 2] = [[0, 0], [1, 0]];

/// `tr(S·xy)` with `S = diag(1, 1, −1, −1)`: trace form on the first block
/// minus the one on the second.
fn split_trace(x: &RatMatrix, y: &RatMatrix) -> Rational {
    let xy = x * y;
    rat(0) + &xy[(0, 0)] + &xy[(1, 1)] - &xy[(2, 2)] - &xy[(3, 3)]
}

/// `(𝔤 ⊕ 𝔤̄, 𝔤_Δ, 𝔲)` for `𝔤 = 𝔰𝔩(2,ℝ)`.
fn standard_sl2() -> BuiltinTriple {
    let basis = vec![sl2_block(0, H), sl2_block(0, E), sl2_block(0, F), sl2_block(1, H), sl2_block(1, E), sl2_block(1, F)];
    let d = MetrizedLieAlgebra::from_matrices(&basis, split_trace).expect("sl2 ⊕ sl2 with opposite forms");
    let g = RatMatrix::from_columns(6, &[combo(6, &[(0, 1), (3, 1)]), combo(6, &[(1, 1), (4, 1)]), combo(6, &[(2, 1), (5, 1)])]);
    // pairs in 𝔟₊ ⊕ 𝔟₋ with opposite Cartan parts
    let h = RatMatrix::from_columns(6, &[combo(6, &[(0, 1), (3, -1)]), unit(6, 1), unit(6, 5)]);
    let triple = ManinTriple::new(d, g, h).expect("standard triple");
    let chart = GroupChart::conjugation(&triple, f64_reps(&basis), "SL(2,R)").expect("faithful");
    BuiltinTriple {
        name: "standard_sl2",
        triple,
        chart,
    }
}

/// `(𝔰𝔩(2,ℝ) ⊕ 𝔥̄, 𝔟₊, 𝔟₋)` with `ξ ↦ (ξ, ±pr_𝔥 ξ)`.
fn borel_sl2() -> BuiltinTriple {
    let basis = vec![sl2_block(0, H), sl2_block(0, E), sl2_block(0, F), sl2_block(1, H)];
    let d = MetrizedLieAlgebra::from_matrices(&basis, split_trace).expect("sl2 ⊕ opposite Cartan");
    let g = RatMatrix::from_columns(4, &[combo(4, &[(0, 1), (3, 1)]), unit(4, 1)]);
    let h = RatMatrix::from_columns(4, &[combo(4, &[(0, 1), (3, -1)]), unit(4, 2)]);
    let triple = ManinTriple::new(d, g, h).expect("Borel triple");
    let chart = GroupChart::conjugation(&triple, f64_reps(&basis), "B+").expect("faithful");
    BuiltinTriple {
        name: "borel_sl2",
        triple,
        chart,
    }
}

fn adjoint_builtin(name: &'static str, triple: ManinTriple) -> BuiltinTriple {
    let chart = GroupChart::adjoint(&triple, name);
    BuiltinTriple { name, triple, chart }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = ["semidirect_so3", "iwasawa_su2", "standard_sl2", "borel_sl2", "double_semidirect_so3"];

pub fn builtin(name: &str) -> Option<BuiltinTriple> {
    Some(match name {
        "semidirect_so3" => adjoint_builtin("semidirect_so3", semidirect(&StructureConstants::so3())),
        "iwasawa_su2" => iwasawa_su2(),
        "standard_sl2" => standard_sl2(),
        "borel_sl2" => borel_sl2(),
        "double_semidirect_so3" => {
            adjoint_builtin("double_semidirect_so3", double(&semidirect(&StructureConstants::so3())))
        }
        _ => return None,
    })
}

pub fn builtin_triples() -> Vec<BuiltinTriple> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).expect("listed names resolve")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_passes_exactly() {
        let all = builtin_triples();
        assert_eq!(all.len(), 5);
        for b in &all {
            assert!(b.triple.check().holds, "{}", b.name);
            assert_eq!(b.chart.dim(), b.triple.half_dim());
        }
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn iwasawa_brackets() {
        let t = builtin("iwasawa_su2").unwrap().triple;
        let d = t.algebra();
        // [u1, n1] = 2 n2 and ⟨u1, h1⟩ = −2
        assert_eq!(d.bracket(&unit(6, 0), &unit(6, 4)), combo(6, &[(5, 2)]));
        assert_eq!(d.pairing(&unit(6, 0), &unit(6, 3)), rat(-2));
    }

    #[test]
    fn semidirect_coadjoint_bracket() {
        let t = semidirect(&StructureConstants::so3());
        // [e1, f2] = f3
        assert_eq!(t.algebra().bracket(&unit(6, 0), &unit(6, 4)), unit(6, 5));
    }

    #[test]
    fn double_has_twice_the_dimension() {
        let t = double(&builtin("borel_sl2").unwrap().triple);
        assert_eq!(t.algebra().dim(), 8);
        assert!(t.check().holds);
    }
}
