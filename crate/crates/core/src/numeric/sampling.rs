//! Seeded sample points. Every random draw in the library and the CLI goes
//! through here so a seed pins the whole run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `[-half_width, half_width]ⁿ`.
pub fn cube(seed: u64, n: usize, count: usize, half_width: f64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count).map(|_| (0..n).map(|_| r.gen_range(-half_width..half_width)).collect()).collect()
}

/// Inside the closed ball of radius `radius`: a cube sample pulled in
/// radially when it lands outside.
pub fn ball(seed: u64, n: usize, count: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count).map(|_| ball_point(&mut r, n, radius)).collect()
}

fn ball_point(r: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let p: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    p.into_iter().map(|v| v * radius / norm).collect()
}

/// Points `(q, p)` of `T*ℝⁿ` with `q` in the cube of half-width `q_half_width`
/// and `‖p‖ ≤ p_radius`.
pub fn cotangent(seed: u64, n: usize, count: usize, q_half_width: f64, p_radius: f64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let mut q: Vec<f64> = (0..n).map(|_| r.gen_range(-q_half_width..q_half_width)).collect();
            q.extend(ball_point(&mut r, n, p_radius));
            q
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        assert_eq!(cube(3, 2, 5, 1.0), cube(3, 2, 5, 1.0));
        assert_ne!(cube(3, 2, 5, 1.0), cube(4, 2, 5, 1.0));
        for p in ball(1, 3, 50, 0.3) {
            assert!(p.iter().map(|v| v * v).sum::<f64>().sqrt() <= 0.3 + 1e-15);
        }
        for x in cotangent(2, 2, 50, 1.0, 0.2) {
            assert!(x[0].abs() <= 1.0 && x[1].abs() <= 1.0);
            assert!((x[2] * x[2] + x[3] * x[3]).sqrt() <= 0.2 + 1e-15);
        }
    }
}
