//! Reproducible low-discrepancy sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;

/// Default seed used by every sweep unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 20_140_807;

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Two-dimensional Halton sequence (bases 2 and 3) with a seeded
/// Cranley–Patterson rotation, so different seeds give different but equally
/// uniform point sets.
#[derive(Debug, Clone)]
pub struct Halton2 {
    shift: [f64; 2],
    index: u64,
}

impl Halton2 {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton2 {
            shift: [rng.gen(), rng.gen()],
            index: 1,
        }
    }
}

impl Iterator for Halton2 {
    type Item = [f64; 2];

    fn next(&mut self) -> Option<[f64; 2]> {
        let i = self.index;
        self.index += 1;
        let a = (radical_inverse(i, 2) + self.shift[0]).fract();
        let b = (radical_inverse(i, 3) + self.shift[1]).fract();
        Some([a, b])
    }
}

/// Axis-aligned rectangle in `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x: (f64, f64),
    pub t: (f64, f64),
}

impl Region {
    pub fn new(x: (f64, f64), t: (f64, f64)) -> Self {
        Region { x, t }
    }

    /// `n` low-discrepancy points inside the rectangle.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(f64, f64)> {
        Halton2::new(seed)
            .take(n)
            .map(|[a, b]| {
                (
                    self.x.0 + a * (self.x.1 - self.x.0),
                    self.t.0 + b * (self.t.1 - self.t.0),
                )
            })
            .collect()
    }
}

/// `n` evenly spread values in `[lo, hi]` (inclusive).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Seeded generator for random test expressions.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random expression in `x`, `t`, `u`, smooth and finite on
/// `x ∈ [0.5, 2], t ∈ [0, 1], u ∈ [0.5, 1.5]` for any `depth`.
pub fn random_expression<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => Expr::x(),
            1 => Expr::t(),
            2 => Expr::u(),
            _ => Expr::constant((rng.gen_range(-2.0f64..2.0) * 100.0).round() / 100.0),
        };
    }
    let a = random_expression(rng, depth - 1);
    // squashed copies stay in [-1, 1] or (0, 1] so outer functions stay tame
    let bounded = |e: &Expr| e / (1.0 + e * e);
    match rng.gen_range(0..9) {
        0 => a + random_expression(rng, depth - 1),
        1 => a - random_expression(rng, depth - 1),
        2 => a * random_expression(rng, depth - 1),
        3 => a / (1.0 + random_expression(rng, depth - 1).powf(2.0)),
        4 => bounded(&a).exp(),
        5 => (1.0 + &a * &a).log(),
        6 => (1.0 + &a * &a).sqrt(),
        7 => bounded(&a).powf(rng.gen_range(2..4) as f64),
        _ => (2.0 + bounded(&a)).powf(rng.gen_range(-1.5f64..1.5)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_deterministic_and_in_unit_square() {
        let a: Vec<_> = Halton2::new(7).take(50).collect();
        let b: Vec<_> = Halton2::new(7).take(50).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (0.0..1.0).contains(&p[0]) && (0.0..1.0).contains(&p[1])));
        let c: Vec<_> = Halton2::new(8).take(50).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn region_samples_stay_inside() {
        let r = Region::new((0.5, 2.0), (0.1, 0.9));
        for (x, t) in r.sample(200, 1) {
            assert!((0.5..=2.0).contains(&x) && (0.1..=0.9).contains(&t));
        }
    }

    #[test]
    fn random_expressions_are_reproducible_and_finite() {
        let a: Vec<String> = (0..20).map(|_| random_expression(&mut rng(3), 4).to_string()).collect();
        let mut r = rng(3);
        let b = random_expression(&mut r, 4).to_string();
        assert_eq!(a[0], b);
        let mut r = rng(5);
        for _ in 0..200 {
            let e = random_expression(&mut r, 4);
            for &(x, t, u) in &[(0.5, 0.0, 0.5), (2.0, 1.0, 1.5), (1.1, 0.4, 0.9)] {
                let v = e.eval(&crate::expr::Point::new(x, t, u)).unwrap();
                assert!(v.is_finite(), "{e}");
            }
        }
    }
}
