use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SAMPLE_COUNT: usize = 64;
pub const DEFAULT_SEED: u64 = 0;

/// `count` points drawn uniformly from `[lo, hi]^dim` with a seeded ChaCha8 stream.
pub fn sample_box(dim: usize, lo: f64, hi: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(lo..=hi)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = sample_box(3, -2.0, 2.0, 10, 7);
        let b = sample_box(3, -2.0, 2.0, 10, 7);
        assert_eq!(a, b);
        assert!(a.iter().flatten().all(|v| (-2.0..=2.0).contains(v)));
        assert_ne!(a, sample_box(3, -2.0, 2.0, 10, 8));
    }
}
