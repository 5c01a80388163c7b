//! Density-restricted subsets of the primes, including the two families that
//! witness sharpness of the density thresholds.
//!
//! A subset stores a packed bit vector over `[0, bound]` supported only on
//! primes, plus the prime count of its table so density ratios are exact.

use crate::rational::{rat_u64, Rational};
use crate::rng;
use crate::sieve::PrimeTable;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubsetError {
    #[error("residue set is empty")]
    EmptyResidues,
    #[error("k = {k} not supported; need k >= 4")]
    BadK { k: usize },
    #[error("{m} is not prime in this table (bound {bound})")]
    NotPrimeMember { m: u64, bound: u64 },
}

/// A set of primes `<= bound` with a label for reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSubset {
    label: String,
    bound: u64,
    bits: Vec<u8>,
    count: u64,
    pi_bound: u64,
}

impl PrimeSubset {
    /// All primes of the table.
    pub fn all(table: &PrimeTable) -> Self {
        PrimeSubset {
            label: "all".into(),
            bound: table.bound(),
            bits: table.bit_bytes().to_vec(),
            count: table.prime_count(),
            pi_bound: table.prime_count(),
        }
    }

    /// The empty subset.
    pub fn empty(table: &PrimeTable) -> Self {
        PrimeSubset {
            label: "empty".into(),
            bound: table.bound(),
            bits: vec![0; table.bit_bytes().len()],
            count: 0,
            pi_bound: table.prime_count(),
        }
    }

    /// `{p <= bound prime : p mod m in residues}`.
    pub fn congruence(
        table: &PrimeTable,
        m: u64,
        residues: &[u64],
        label: impl Into<String>,
    ) -> Result<Self, SubsetError> {
        if residues.is_empty() {
            return Err(SubsetError::EmptyResidues);
        }
        assert!(m >= 1);
        let mut wanted = vec![false; m as usize];
        for &r in residues {
            wanted[(r % m) as usize] = true;
        }
        Ok(Self::collect(table, label.into(), |p| {
            wanted[(p % m) as usize]
        }))
    }

    /// Keep each prime independently with probability `alpha`, keyed on
    /// (seed, prime) so construction order is irrelevant.
    pub fn random_density(table: &PrimeTable, alpha: f64, seed: u64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "density must be in (0, 1]");
        let label = format!("random(alpha={alpha},seed={seed})");
        Self::collect(table, label, |p| {
            alpha >= 1.0 || rng::unit_f64(seed, 0x5f5e7, p) < alpha
        })
    }

    /// Build from an explicit list; every member must be prime in the table.
    pub fn from_primes<I: IntoIterator<Item = u64>>(
        table: &PrimeTable,
        primes: I,
        label: impl Into<String>,
    ) -> Result<Self, SubsetError> {
        let mut s = Self::empty(table);
        s.label = label.into();
        for p in primes {
            if !table.is_prime(p) {
                return Err(SubsetError::NotPrimeMember {
                    m: p,
                    bound: table.bound(),
                });
            }
            if !s.contains(p) {
                s.bits[(p >> 3) as usize] |= 1 << (p & 7);
                s.count += 1;
            }
        }
        Ok(s)
    }

    fn collect(table: &PrimeTable, label: String, mut keep: impl FnMut(u64) -> bool) -> Self {
        let mut bits = vec![0u8; table.bit_bytes().len()];
        let mut count = 0;
        for p in table.primes() {
            if keep(p) {
                bits[(p >> 3) as usize] |= 1 << (p & 7);
                count += 1;
            }
        }
        PrimeSubset {
            label,
            bound: table.bound(),
            bits,
            count,
            pi_bound: table.prime_count(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Primes in the whole table (denominator of the density ratio).
    pub fn pi_bound(&self) -> u64 {
        self.pi_bound
    }

    pub fn contains(&self, p: u64) -> bool {
        p <= self.bound && self.bits[(p >> 3) as usize] & (1 << (p & 7)) != 0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.bound).filter(move |&p| self.contains(p))
    }

    /// Copy with one prime removed.
    pub fn without(&self, p: u64) -> Self {
        let mut s = self.clone();
        if s.contains(p) {
            s.bits[(p >> 3) as usize] &= !(1 << (p & 7));
            s.count -= 1;
        }
        s.label = format!("{} \\ {{{p}}}", self.label);
        s
    }

    /// `|P| / pi(bound)` as an exact rational; the finite-bound stand-in for
    /// the asymptotic lower density.
    pub fn lower_density(&self) -> Rational {
        rat_u64(self.count) / rat_u64(self.pi_bound)
    }

    pub fn density_f64(&self) -> f64 {
        self.count as f64 / self.pi_bound as f64
    }

    /// 0/1 indicator over `[0, n_max]` for convolution counting.
    pub fn indicator(&self, n_max: u64) -> Vec<u64> {
        let mut v = vec![0u64; (n_max.min(self.bound) + 1) as usize];
        for p in self.primes().take_while(|&p| p <= n_max) {
            v[p as usize] = 1;
        }
        v
    }

    /// Raw little-endian bit payload in the same layout as `PrimeTable`.
    pub fn bit_bytes(&self) -> &[u8] {
        &self.bits
    }

    /// Residue classes mod `m` hit by this subset.
    pub fn residue_support(&self, m: u64) -> Vec<u64> {
        let mut seen = vec![false; m as usize];
        for p in self.primes() {
            seen[(p % m) as usize] = true;
        }
        (0..m).filter(|&r| seen[r as usize]).collect()
    }
}

/// The two constructions that meet the density threshold exactly while
/// failing the representation conclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `k - 1` copies of `{p = r mod 3}` plus all primes except 3. The residue
    /// `r` is a parameter; which class becomes unrepresentable is computed,
    /// not assumed.
    ShiftedMod3 { residue: u64 },
    /// `k - 2` copies of `{p = 1 mod 3}`, then all primes, then the empty set.
    EmptyLast,
}

/// Build one of the sharpness families for `k >= 4` summands.
pub fn sharpness_family(
    kind: FamilyKind,
    k: usize,
    table: &PrimeTable,
) -> Result<Vec<PrimeSubset>, SubsetError> {
    if k < 4 {
        return Err(SubsetError::BadK { k });
    }
    match kind {
        FamilyKind::ShiftedMod3 { residue } => {
            let r = residue % 3;
            if r == 0 {
                // the class of 3 itself contains one prime; that is a
                // degenerate family, not the intended construction
                return Err(SubsetError::EmptyResidues);
            }
            let half = PrimeSubset::congruence(table, 3, &[r], format!("p=={r} mod 3"))?;
            let mut family = vec![half; k - 1];
            family.push(PrimeSubset::all(table).without(3));
            Ok(family)
        }
        FamilyKind::EmptyLast => {
            let half = PrimeSubset::congruence(table, 3, &[1], "p==1 mod 3")?;
            let mut family = vec![half; k - 2];
            family.push(PrimeSubset::all(table));
            family.push(PrimeSubset::empty(table));
            Ok(family)
        }
    }
}

/// Residue classes mod `m` that no sum `p_1 + ... + p_k` (p_i from subsets)
/// can hit, found by an exhaustive sumset over the residue supports.
pub fn residue_obstructions(subsets: &[PrimeSubset], m: u64) -> Vec<u64> {
    let mut reachable = vec![false; m as usize];
    reachable[0] = true;
    for s in subsets {
        let support = s.residue_support(m);
        let mut next = vec![false; m as usize];
        for (r, &ok) in reachable.iter().enumerate() {
            if ok {
                for &a in &support {
                    next[((r as u64 + a) % m) as usize] = true;
                }
            }
        }
        reachable = next;
    }
    (0..m).filter(|&r| !reachable[r as usize]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn table() -> PrimeTable {
        PrimeTable::sieve(10_000).unwrap()
    }

    #[test]
    fn congruence_examples() {
        let t = PrimeTable::sieve(50).unwrap();
        let s = PrimeSubset::congruence(&t, 3, &[1], "m3r1").unwrap();
        assert_eq!(s.primes().collect::<Vec<_>>(), vec![7, 13, 19, 31, 37, 43]);

        let all = PrimeSubset::congruence(&t, 1, &[0], "full").unwrap();
        assert_eq!(all.len(), t.prime_count());

        let t20 = PrimeTable::sieve(20).unwrap();
        let evens = PrimeSubset::congruence(&t20, 2, &[0], "even").unwrap();
        assert_eq!(evens.primes().collect::<Vec<_>>(), vec![2]);

        assert_eq!(
            PrimeSubset::congruence(&t, 3, &[], "none"),
            Err(SubsetError::EmptyResidues)
        );
    }

    #[test]
    fn random_density_is_reproducible_and_concentrated() {
        let t = table();
        let a = PrimeSubset::random_density(&t, 0.6, 7);
        let b = PrimeSubset::random_density(&t, 0.6, 7);
        assert_eq!(a, b);
        let c = PrimeSubset::random_density(&t, 0.6, 8);
        assert_ne!(a, c);
        let d = a.density_f64();
        assert!((d - 0.6).abs() < 0.05, "density {d}");
        assert_eq!(PrimeSubset::random_density(&t, 1.0, 0).len(), t.prime_count());
    }

    #[test]
    fn every_member_is_prime() {
        let t = table();
        let s = PrimeSubset::random_density(&t, 0.3, 99);
        for p in s.primes() {
            assert!(t.is_prime(p));
        }
        assert!(PrimeSubset::from_primes(&t, [4], "bad").is_err());
    }

    #[test]
    fn lower_density_edges() {
        let t = table();
        assert_eq!(PrimeSubset::all(&t).lower_density(), rat(1, 1));
        assert_eq!(PrimeSubset::empty(&t).lower_density(), rat(0, 1));
    }

    #[test]
    fn family_shapes() {
        let t = PrimeTable::sieve(100).unwrap();
        let fam = sharpness_family(FamilyKind::EmptyLast, 4, &t).unwrap();
        assert_eq!(fam.len(), 4);
        assert!(fam[3].is_empty());
        assert_eq!(fam[2].len(), 25);

        let fam = sharpness_family(FamilyKind::ShiftedMod3 { residue: 1 }, 4, &t).unwrap();
        assert!(!fam[3].contains(3));
        assert!(fam[3].contains(97));

        assert_eq!(
            sharpness_family(FamilyKind::EmptyLast, 3, &t),
            Err(SubsetError::BadK { k: 3 })
        );
    }

    #[test]
    fn obstruction_classes_are_computed() {
        let t = table();
        // k = 4, shift 1: sums hit (k-1)*1 + {1,2} = {1, 2} mod 3; class 0 is blocked
        let fam = sharpness_family(FamilyKind::ShiftedMod3 { residue: 1 }, 4, &t).unwrap();
        assert_eq!(residue_obstructions(&fam, 3), vec![0]);
        // k = 5 keeps a blocked class too: 4*1 + {1,2} = {2, 0}, so 1 is blocked
        let fam5 = sharpness_family(FamilyKind::ShiftedMod3 { residue: 1 }, 5, &t).unwrap();
        assert_eq!(residue_obstructions(&fam5, 3), vec![1]);
        // empty-last blocks everything
        let faml = sharpness_family(FamilyKind::EmptyLast, 4, &t).unwrap();
        assert_eq!(residue_obstructions(&faml, 3), vec![0, 1, 2]);
    }

    #[test]
    fn shifted_family_density_sums_near_half_k_plus_one() {
        let t = table();
        for k in [4usize, 5, 7] {
            let fam = sharpness_family(FamilyKind::ShiftedMod3 { residue: 1 }, k, &t).unwrap();
            let total: f64 = fam.iter().map(|s| s.density_f64()).sum();
            let target = (k + 1) as f64 / 2.0;
            assert!((total - target).abs() < 0.05, "k={k} total={total}");
        }
    }
}
