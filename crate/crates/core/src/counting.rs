//! Exact k-fold prime-representation counting over integer intervals.
//!
//! Counts are ordered: `count_kfold(P_1..P_k, n)` is the number of tuples
//! `(p_1, ..., p_k)` with `p_i in P_i` and `p_1 + ... + p_k = n`. Ordered
//! counts are what iterated convolution computes natively; unordered variants
//! divide out symmetry downstream if anyone needs them.

use crate::ntt::{convolve_exact, ConvolveError};
use crate::subsets::PrimeSubset;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("subsets live on different bounds: {a} vs {b}")]
    BoundMismatch { a: u64, b: u64 },
    #[error("target {n} exceeds k * bound = {max}")]
    TargetOutOfRange { n: u64, max: u64 },
    #[error(transparent)]
    Convolve(#[from] ConvolveError),
    #[error("no subsets given")]
    Empty,
}

/// Representation counts for every `n <= n_max`: entry `n` is the ordered
/// count of k-tuples summing to `n`. Convolutions are truncated to `n_max`,
/// so memory stays proportional to the requested range.
pub fn representation_table(subsets: &[&PrimeSubset], n_max: u64) -> Result<Vec<u64>, CountError> {
    if subsets.is_empty() {
        return Err(CountError::Empty);
    }
    let bound = subsets[0].bound();
    for s in subsets {
        if s.bound() != bound {
            return Err(CountError::BoundMismatch {
                a: bound,
                b: s.bound(),
            });
        }
    }
    let cap = (n_max + 1) as usize;
    let mut acc = subsets[0].indicator(n_max);
    for s in &subsets[1..] {
        let ind = s.indicator(n_max);
        let mut conv = convolve_exact(&acc, &ind)?;
        conv.truncate(cap);
        acc = conv;
    }
    acc.resize(cap, 0);
    Ok(acc)
}

/// Ordered count of k-tuples summing to exactly `n`.
pub fn count_kfold(subsets: &[&PrimeSubset], n: u64) -> Result<u64, CountError> {
    if subsets.is_empty() {
        return Err(CountError::Empty);
    }
    let max = subsets[0].bound() * subsets.len() as u64;
    if n > max {
        return Err(CountError::TargetOutOfRange { n, max });
    }
    let table = representation_table(subsets, n)?;
    Ok(table[n as usize])
}

/// Which targets a scan ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    All,
}

impl Parity {
    pub fn admits(&self, n: u64) -> bool {
        match self {
            Parity::Even => n % 2 == 0,
            Parity::Odd => n % 2 == 1,
            Parity::All => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSummary {
    pub k: usize,
    pub labels: Vec<String>,
    pub lo: u64,
    pub hi: u64,
    pub parity: Parity,
    pub admissible: u64,
    pub zeros: u64,
    /// Largest admissible target in range with count zero.
    pub largest_zero: Option<u64>,
    /// Statistics over admissible targets above `largest_zero` (the whole
    /// range when everything is represented).
    pub min_count_after: Option<u64>,
    pub median_count_after: Option<u64>,
}

/// Count every admissible target in `[lo, hi]` and summarize the empirical
/// threshold: the largest unrepresentable admissible target, and how counts
/// behave above it.
pub fn scan_representations(
    subsets: &[&PrimeSubset],
    lo: u64,
    hi: u64,
    parity: Parity,
) -> Result<(Vec<(u64, u64)>, ScanSummary), CountError> {
    if subsets.is_empty() {
        return Err(CountError::Empty);
    }
    let max = subsets[0].bound() * subsets.len() as u64;
    if hi > max {
        return Err(CountError::TargetOutOfRange { n: hi, max });
    }
    let table = representation_table(subsets, hi)?;
    let rows: Vec<(u64, u64)> = (lo..=hi)
        .into_par_iter()
        .filter(|&n| parity.admits(n))
        .map(|n| (n, table[n as usize]))
        .collect();

    let largest_zero = rows.iter().rev().find(|(_, c)| *c == 0).map(|&(n, _)| n);
    let after: Vec<u64> = match largest_zero {
        Some(z) => rows
            .iter()
            .filter(|&&(n, _)| n > z)
            .map(|&(_, c)| c)
            .collect(),
        None => rows.iter().map(|&(_, c)| c).collect(),
    };
    let (min_count_after, median_count_after) = if after.is_empty() {
        (None, None)
    } else {
        let mut sorted = after.clone();
        sorted.sort_unstable();
        (Some(sorted[0]), Some(sorted[sorted.len() / 2]))
    };
    let summary = ScanSummary {
        k: subsets.len(),
        labels: subsets.iter().map(|s| s.label().to_string()).collect(),
        lo,
        hi,
        parity,
        admissible: rows.len() as u64,
        zeros: rows.iter().filter(|(_, c)| *c == 0).count() as u64,
        largest_zero,
        min_count_after,
        median_count_after,
    };
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::PrimeTable;

    #[test]
    fn pair_counts_match_enumeration() {
        let t = PrimeTable::sieve(20).unwrap();
        let all = PrimeSubset::all(&t);
        assert_eq!(count_kfold(&[&all, &all], 10).unwrap(), 3);
    }

    #[test]
    fn mod3_class_count_at_40() {
        let t = PrimeTable::sieve(200).unwrap();
        let s = PrimeSubset::congruence(&t, 3, &[1], "m3r1").unwrap();
        // multisets {7,7,7,19} (4 orderings) and {7,7,13,13} (6 orderings)
        assert_eq!(count_kfold(&[&s, &s, &s, &s], 40).unwrap(), 10);
    }

    #[test]
    fn forced_zero_by_congruence() {
        let t = PrimeTable::sieve(200).unwrap();
        let s = PrimeSubset::congruence(&t, 3, &[1], "m3r1").unwrap();
        // 102 = 0 mod 3, but any 4 primes = 1 mod 3 sum to 1 mod 3
        assert_eq!(count_kfold(&[&s, &s, &s, &s], 102).unwrap(), 0);
    }

    #[test]
    fn table_matches_direct_enumeration_small() {
        let t = PrimeTable::sieve(60).unwrap();
        let a = PrimeSubset::congruence(&t, 4, &[1], "m4r1").unwrap();
        let b = PrimeSubset::congruence(&t, 4, &[3], "m4r3").unwrap();
        let table = representation_table(&[&a, &b], 120).unwrap();
        let pa: Vec<u64> = a.primes().collect();
        let pb: Vec<u64> = b.primes().collect();
        for n in 0..=120u64 {
            let direct = pa
                .iter()
                .flat_map(|&x| pb.iter().map(move |&y| x + y))
                .filter(|&s| s == n)
                .count() as u64;
            assert_eq!(table[n as usize], direct, "n={n}");
        }
    }

    #[test]
    fn count_is_symmetric_and_monotone() {
        let t = PrimeTable::sieve(500).unwrap();
        let a = PrimeSubset::congruence(&t, 3, &[1], "a").unwrap();
        let b = PrimeSubset::congruence(&t, 4, &[3], "b").unwrap();
        let c = PrimeSubset::all(&t);
        for n in [30u64, 60, 100, 151] {
            let abc = count_kfold(&[&a, &b, &c], n).unwrap();
            let cba = count_kfold(&[&c, &b, &a], n).unwrap();
            assert_eq!(abc, cba);
            // enlarging a subset never decreases a count
            let bigger = count_kfold(&[&c, &b, &c], n).unwrap();
            assert!(bigger >= abc);
        }
    }

    #[test]
    fn scan_summary_shape() {
        let t = PrimeTable::sieve(1000).unwrap();
        let all = PrimeSubset::all(&t);
        let (rows, summary) =
            scan_representations(&[&all, &all, &all, &all], 16, 2000, Parity::Even).unwrap();
        assert!(rows.iter().all(|&(n, _)| n % 2 == 0));
        // every even n >= 16 here is a sum of four primes
        assert_eq!(summary.largest_zero, None);
        assert_eq!(summary.zeros, 0);
        assert!(summary.min_count_after.unwrap() > 0);
    }

    #[test]
    fn bound_mismatch_rejected() {
        let t1 = PrimeTable::sieve(100).unwrap();
        let t2 = PrimeTable::sieve(200).unwrap();
        let a = PrimeSubset::all(&t1);
        let b = PrimeSubset::all(&t2);
        assert!(matches!(
            count_kfold(&[&a, &b], 10),
            Err(CountError::BoundMismatch { .. })
        ));
        assert!(matches!(
            count_kfold(&[&a, &a], 1000),
            Err(CountError::TargetOutOfRange { .. })
        ));
    }
}
