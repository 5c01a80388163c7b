//! Segmented sieve of Eratosthenes with a packed bit table.
//!
//! The table is the primality substrate for every prime-subset construction
//! and scan. Segments are sieved independently (in parallel) and concatenated,
//! so the result is identical regardless of thread count.

use rayon::prelude::*;
use thiserror::Error;

/// Default upper bound guard: a 10^8 table costs 12.5 MB.
pub const DEFAULT_BOUND_BUDGET: u64 = 100_000_000;
/// Segment length in integers; multiples of 8 keep byte ownership disjoint.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("bound {bound} exceeds configured budget {budget}")]
    BoundTooLarge { bound: u64, budget: u64 },
    #[error("bound {bound} too small; need at least 2")]
    BoundTooSmall { bound: u64 },
    #[error("bit table has {got} bytes, expected {expected} for bound {bound}")]
    CorruptTable { bound: u64, got: usize, expected: usize },
}

/// Primality of every integer in `[0, bound]`, one bit per integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    bound: u64,
    bits: Vec<u8>,
    count: u64,
}

impl PrimeTable {
    /// Sieve `[0, bound]` with default segment length and budget.
    pub fn sieve(bound: u64) -> Result<Self, SieveError> {
        Self::sieve_with(bound, DEFAULT_SEGMENT_LEN, DEFAULT_BOUND_BUDGET)
    }

    pub fn sieve_with(bound: u64, segment_len: u64, budget: u64) -> Result<Self, SieveError> {
        if bound < 2 {
            return Err(SieveError::BoundTooSmall { bound });
        }
        if bound > budget {
            return Err(SieveError::BoundTooLarge { bound, budget });
        }
        let segment_len = segment_len.max(64) & !7; // multiple of 8
        let root = bound.isqrt();
        let base = simple_sieve(root.max(2));

        let n_segments = (bound + 1).div_ceil(segment_len);
        let bytes: Vec<u8> = (0..n_segments)
            .into_par_iter()
            .flat_map_iter(|seg| {
                let lo = seg * segment_len;
                let hi = (lo + segment_len - 1).min(bound);
                sieve_segment(lo, hi, &base)
            })
            .collect();

        let count = bytes.iter().map(|b| b.count_ones() as u64).sum();
        Ok(PrimeTable {
            bound,
            bits: bytes,
            count,
        })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Number of primes <= bound.
    pub fn prime_count(&self) -> u64 {
        self.count
    }

    pub fn is_prime(&self, m: u64) -> bool {
        m <= self.bound && self.bits[(m >> 3) as usize] & (1 << (m & 7)) != 0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.bound).filter(move |&m| self.is_prime(m))
    }

    /// Number of primes in `[lo, hi]`.
    pub fn count_in(&self, lo: u64, hi: u64) -> u64 {
        (lo..=hi.min(self.bound))
            .filter(|&m| self.is_prime(m))
            .count() as u64
    }

    /// Smallest prime in `[lo, hi]`, if any.
    pub fn first_prime_in(&self, lo: u64, hi: u64) -> Option<u64> {
        (lo..=hi.min(self.bound)).find(|&m| self.is_prime(m))
    }

    /// Raw little-endian bit payload (bit `m` of byte `m / 8` marks `m` prime).
    pub fn bit_bytes(&self) -> &[u8] {
        &self.bits
    }

    /// Rebuild from a raw bit payload, re-deriving the count.
    pub fn from_bit_bytes(bound: u64, bits: Vec<u8>) -> Result<Self, SieveError> {
        if bound < 2 {
            return Err(SieveError::BoundTooSmall { bound });
        }
        let expected = ((bound + 1) as usize).div_ceil(8);
        if bits.len() != expected {
            return Err(SieveError::CorruptTable {
                bound,
                got: bits.len(),
                expected,
            });
        }
        let count = bits.iter().map(|b| b.count_ones() as u64).sum();
        Ok(PrimeTable { bound, bits, count })
    }
}

/// Plain sieve used for the base primes up to sqrt(bound).
fn simple_sieve(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut is_comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for m in 2..=n {
        if !is_comp[m] {
            primes.push(m as u64);
            let mut j = m * m;
            while j <= n {
                is_comp[j] = true;
                j += m;
            }
        }
    }
    primes
}

/// Sieve one segment `[lo, hi]` into packed bytes (lo divisible by 8).
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u8> {
    debug_assert_eq!(lo % 8, 0);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let start = p.max(lo.div_ceil(p)) * p;
        let mut j = start;
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    let mut bytes = vec![0u8; len.div_ceil(8)];
    for (off, &comp) in composite.iter().enumerate() {
        let m = lo + off as u64;
        if m >= 2 && !comp {
            bytes[off >> 3] |= 1 << (off & 7);
        }
    }
    bytes
}
