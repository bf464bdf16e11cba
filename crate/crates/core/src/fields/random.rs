//! Seeded random polynomial data for property checks.

use rand::Rng;

use super::alternating::{Alternating, Kind, PolyKVector};
use super::poly::{ratio, PolyScalar};

/// Shape of randomly drawn polynomials.
#[derive(Clone, Copy, Debug)]
pub struct RandomPoly {
    pub max_degree: u32,
    pub max_terms: usize,
    /// Coefficients are `p/q` with `|p| ≤ coeff_bound`, `1 ≤ q ≤ 3`.
    pub coeff_bound: i64,
}

impl Default for RandomPoly {
    fn default() -> Self {
        RandomPoly {
            max_degree: 3,
            max_terms: 4,
            coeff_bound: 5,
        }
    }
}

impl RandomPoly {
    pub fn poly<R: Rng + ?Sized>(&self, rng: &mut R, nvars: usize) -> PolyScalar {
        let nterms = rng.gen_range(0..=self.max_terms);
        let terms = (0..nterms).map(|_| {
            let deg = if nvars == 0 { 0 } else { rng.gen_range(0..=self.max_degree) };
            let mut exps = vec![0u32; nvars];
            for _ in 0..deg {
                exps[rng.gen_range(0..nvars)] += 1;
            }
            let num = rng.gen_range(-self.coeff_bound..=self.coeff_bound);
            let den = rng.gen_range(1..=3);
            (exps, ratio(num, den))
        });
        PolyScalar::from_terms(nvars, terms.collect::<Vec<_>>())
    }

    /// Alternating tensor with every component drawn independently.
    pub fn tensor<K: Kind, R: Rng + ?Sized>(&self, rng: &mut R, dim: usize, degree: usize) -> Alternating<K> {
        let comps = increasing_tuples(dim, degree)
            .into_iter()
            .map(|idx| {
                let p = self.poly(rng, dim);
                (idx, p)
            })
            .collect::<Vec<_>>();
        Alternating::from_components(dim, degree, comps)
    }

    pub fn vector_field<R: Rng + ?Sized>(&self, rng: &mut R, dim: usize) -> PolyKVector {
        self.tensor(rng, dim, 1)
    }
}

/// All strictly increasing index tuples of length `k` in `0..n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_count() {
        assert_eq!(increasing_tuples(4, 2).len(), 6);
        assert_eq!(increasing_tuples(3, 0), vec![Vec::<usize>::new()]);
        assert!(increasing_tuples(2, 3).is_empty());
    }
}
