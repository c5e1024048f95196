//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator. A master seed fans out into
//! independent sub-streams by selecting the ChaCha stream id, so the draws an
//! optimizer sees depend only on `(master_seed, index)` and never on thread
//! scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Sub-stream `index` of `seed`. Distinct indices give non-overlapping
    /// sequences.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self { inner }
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw in `[lo, hi]`; returns `lo` for a zero-width interval.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            lo
        } else {
            lo + (hi - lo) * self.uniform()
        }
    }

    /// Standard normal draw.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform index in `0..n`. `n` must be positive.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Uniform index in `0..n` different from `exclude`. Needs `n >= 2`.
    pub fn index_excluding(&mut self, n: usize, exclude: &[usize]) -> usize {
        debug_assert!(n > exclude.len());
        loop {
            let i = self.index(n);
            if !exclude.contains(&i) {
                return i;
            }
        }
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }

    #[test]
    fn substreams_differ() {
        let mut a = RngStream::substream(7, 0);
        let mut b = RngStream::substream(7, 1);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn index_excluding_never_returns_excluded() {
        let mut r = RngStream::new(3);
        for _ in 0..1000 {
            let i = r.index_excluding(4, &[0, 2]);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn degenerate_interval() {
        let mut r = RngStream::new(1);
        assert_eq!(r.uniform_in(2.0, 2.0), 2.0);
    }
}
