//! The single pseudo-random contract used by every randomized routine.
//!
//! * Generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), seeded through
//!   `SeedableRng::seed_from_u64`, whose key expansion is fixed and portable.
//! * Bounded integers: Lemire's multiply-and-reject over `next_u64`, so the
//!   mapping from stream to value does not depend on any `rand` version.
//! * Sub-streams: [`derive_seed`] mixes a user seed with a stream index using
//!   the SplitMix64 finalizer.
//!
//! Changing anything here changes every golden file.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone)]
pub struct TraceRng {
    inner: ChaCha8Rng,
}

impl TraceRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`. Panics if `bound` is zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below() needs a positive bound");
        let mut m = (self.next_u64() as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = (self.next_u64() as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Fisher-Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// `n` distinct indices from `0..population` (Floyd's algorithm), ascending.
    pub fn distinct_sorted(&mut self, population: usize, n: usize) -> Vec<usize> {
        let n = n.min(population);
        let mut taken = vec![false; population];
        let mut out = Vec::with_capacity(n);
        for j in (population - n)..population {
            let t = self.index(j + 1);
            let pick = if taken[t] { j } else { t };
            taken[pick] = true;
            out.push(pick);
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = TraceRng::new(42);
        let mut b = TraceRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = TraceRng::new(7);
        for bound in [1u64, 2, 3, 7, 1000, u64::MAX] {
            for _ in 0..200 {
                assert!(r.below(bound) < bound);
            }
        }
    }

    #[test]
    fn distinct_sorted_has_no_repeats() {
        let mut r = TraceRng::new(1);
        let picks = r.distinct_sorted(50, 20);
        assert_eq!(picks.len(), 20);
        assert!(picks.windows(2).all(|w| w[0] < w[1]));
        assert!(picks.iter().all(|&p| p < 50));
        assert_eq!(r.distinct_sorted(5, 9), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn derived_streams_differ() {
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(0, 1), derive_seed(1, 1));
        assert_eq!(derive_seed(9, 3), derive_seed(9, 3));
    }

    // Pinned first outputs; a change here means every golden file moved.
    #[test]
    fn stream_is_pinned() {
        let mut r = TraceRng::new(0);
        let got: Vec<u64> = (0..3).map(|_| r.below(1000)).collect();
        assert_eq!(got, PINNED_BELOW_1000);
    }

    const PINNED_BELOW_1000: [u64; 3] = [709, 465, 699];
}
