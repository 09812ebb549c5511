//! Self-contained deterministic PRNG so generated corpora and random
//! schedules are reproducible across platforms and toolchains.

use num_bigint::BigUint;
use num_traits::Zero;

/// SplitMix64. Starting from the seed, each draw is
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
///
/// All arithmetic is modulo 2^64. Any seed, including 0, is valid.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw from `0..bound` (plain modular reduction; the tiny
    /// bias is irrelevant for scheduling and test-case generation).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below requires a positive bound");
        self.next_u64() % bound
    }

    /// Draw from `0..bound` for arbitrary-precision bounds: assemble 64 bits
    /// more than the bound's width, then reduce.
    pub fn next_biguint_below(&mut self, bound: &BigUint) -> BigUint {
        assert!(
            !bound.is_zero(),
            "next_biguint_below requires a positive bound"
        );
        let limbs = (bound.bits() / 64 + 2) as usize;
        let mut digits = Vec::with_capacity(limbs);
        for _ in 0..limbs {
            digits.push(self.next_u64());
        }
        BigUint::from_slice(
            &digits
                .iter()
                .flat_map(|d| [(*d & 0xFFFF_FFFF) as u32, (*d >> 32) as u32])
                .collect::<Vec<u32>>(),
        ) % bound
    }
}
