//! Halton sequences with a seeded Cranley–Patterson rotation.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Shifted Halton points in `[0, 1)^dim`; the shift is drawn from a ChaCha
/// stream keyed by `seed`, so a seed fully determines the sequence.
#[derive(Clone, Debug)]
pub struct Halton {
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Halton {
        assert!(dim <= PRIMES.len(), "Halton dimension above {}", PRIMES.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton { shift: (0..dim).map(|_| rng.gen::<f64>()).collect(), index: 1 }
    }

    /// The `i`-th point (1-based), independent of iteration state.
    pub fn point(&self, i: u64) -> Vec<f64> {
        self.shift
            .iter()
            .enumerate()
            .map(|(d, s)| {
                let v = radical_inverse(i, PRIMES[d]) + s;
                if v >= 1.0 {
                    v - 1.0
                } else {
                    v
                }
            })
            .collect()
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let p = self.point(self.index);
        self.index += 1;
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn seeded_and_in_range() {
        let a: Vec<_> = Halton::new(3, 7).take(100).collect();
        let b: Vec<_> = Halton::new(3, 7).take(100).collect();
        let c: Vec<_> = Halton::new(3, 8).take(100).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().flatten().all(|v| (0.0..1.0).contains(v)));
    }
}
