//! Exact sumset arithmetic on Z_m and representation-count lower bounds.
//!
//! Sets are bit vectors; the k-fold sumset is an iterated cyclic shift-or.
//! `count_representations_modn` counts ordered tuples exactly by iterated
//! cyclic convolution with checked integer accumulation.

use crate::rational::{rat_int, Rational};
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumsetError {
    #[error("a summand set is empty")]
    EmptySet,
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("representation count exceeds u64")]
    Overflow,
    #[error("element {x} outside Z_{m}")]
    OutOfRange { x: u64, m: u64 },
}

/// A subset of Z_m as a packed bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZnSet {
    m: u64,
    words: Vec<u64>,
}

impl ZnSet {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1);
        ZnSet {
            m,
            words: vec![0; (m as usize).div_ceil(64)],
        }
    }

    pub fn from_iter<I: IntoIterator<Item = u64>>(m: u64, elems: I) -> Result<Self, SumsetError> {
        let mut s = Self::new(m);
        for x in elems {
            if x >= m {
                return Err(SumsetError::OutOfRange { x, m });
            }
            s.insert(x);
        }
        Ok(s)
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn insert(&mut self, x: u64) {
        debug_assert!(x < self.m);
        self.words[(x >> 6) as usize] |= 1 << (x & 63);
    }

    pub fn contains(&self, x: u64) -> bool {
        x < self.m && self.words[(x >> 6) as usize] & (1 << (x & 63)) != 0
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn elems(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.m).filter(move |&x| self.contains(x))
    }

    /// OR of `other` rotated by `shift` (mod m) into `self`.
    fn or_rotated(&mut self, other: &ZnSet, shift: u64) {
        // cheap and correct for the moduli used here; the hot loops in this
        // crate are elsewhere
        for x in other.elems() {
            let y = (x + shift) % self.m;
            self.insert(y);
        }
    }
}

/// `{ x_1 + ... + x_k mod m : x_i in sets[i] }` by iterated shift-or.
pub fn sumset(m: u64, sets: &[ZnSet]) -> Result<ZnSet, SumsetError> {
    if sets.is_empty() || sets.iter().any(|s| s.is_empty()) {
        return Err(SumsetError::EmptySet);
    }
    let mut acc = ZnSet::new(m);
    acc.insert(0);
    for set in sets {
        let mut next = ZnSet::new(m);
        for a in acc.elems() {
            next.or_rotated(set, a);
        }
        acc = next;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdReport {
    pub p: u64,
    pub sizes: Vec<u64>,
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

/// Check `|A_1 + ... + A_k| >= min(p, sum |A_i| - k + 1)` on Z_p. The
/// inequality is a theorem, so `holds == false` signals a defect in the
/// sumset code, not in the inputs.
pub fn cauchy_davenport_check(p: u64, sets: &[ZnSet]) -> Result<CdReport, SumsetError> {
    if !is_prime_u64(p) {
        return Err(SumsetError::NotPrime { p });
    }
    if sets.is_empty() || sets.iter().any(|s| s.is_empty()) {
        return Err(SumsetError::EmptySet);
    }
    let sizes: Vec<u64> = sets.iter().map(|s| s.len()).collect();
    let lhs = sumset(p, sets)?.len();
    let k = sets.len() as u64;
    let rhs = p.min(sizes.iter().sum::<u64>() - k + 1);
    Ok(CdReport {
        p,
        sizes,
        lhs,
        rhs,
        holds: lhs >= rhs,
    })
}

/// Ordered representation counts on Z_n: entry `t` is the number of tuples
/// `(x_1, ..., x_k)`, `x_i in sets[i]`, with `x_1 + ... + x_k = t (mod n)`.
/// Exact; errors on u64 overflow.
pub fn count_representations_modn(sets: &[ZnSet]) -> Result<Vec<u64>, SumsetError> {
    if sets.is_empty() {
        return Err(SumsetError::EmptySet);
    }
    let m = sets[0].modulus() as usize;
    let mut acc: Vec<u128> = vec![0; m];
    acc[0] = 1;
    for set in sets {
        debug_assert_eq!(set.modulus() as usize, m);
        let mut next: Vec<u128> = vec![0; m];
        for x in set.elems() {
            let x = x as usize;
            for (r, &count) in acc.iter().enumerate() {
                if count != 0 {
                    let t = (r + x) % m;
                    next[t] = next[t]
                        .checked_add(count)
                        .ok_or(SumsetError::Overflow)?;
                }
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|c| c.to_u64().ok_or(SumsetError::Overflow))
        .collect()
}

/// `nu(t)` for a single target; see [`count_representations_modn`].
pub fn nu_at(sets: &[ZnSet], t: u64) -> Result<u64, SumsetError> {
    let table = count_representations_modn(sets)?;
    Ok(table[(t % sets[0].modulus()) as usize])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarnavidesBound {
    pub theta: Rational,
    /// `theta^(2k-3) * n^(k-1)`; every target's ordered count is at least
    /// this once each `|X_i| >= theta_i * n`.
    pub bound: Rational,
}

/// The representation-count lower bound for dense subsets of Z_n: with
/// `theta = min(theta_1, ..., theta_k, (sum theta_i - 1)/(3k - 5))` and
/// `n > 2 theta^-2`, every element of Z_n has at least
/// `theta^(2k-3) * n^(k-1)` ordered representations.
pub fn varnavides_bound(thetas: &[Rational], n: u64) -> Result<VarnavidesBound, SumsetError> {
    let k = thetas.len();
    if k < 2 {
        return Err(SumsetError::HypothesisUnmet("need k >= 2".into()));
    }
    for t in thetas {
        if !t.is_positive() || *t > Rational::one() {
            return Err(SumsetError::HypothesisUnmet(
                "thetas must lie in (0, 1]".into(),
            ));
        }
    }
    let total: Rational = thetas.iter().sum();
    if total <= Rational::one() {
        return Err(SumsetError::HypothesisUnmet("sum of thetas <= 1".into()));
    }
    let spread = (&total - Rational::one()) / rat_int((3 * k - 5) as i64);
    let theta = thetas.iter().fold(spread, |acc, t| acc.min(t.clone()));
    // n > 2 / theta^2
    if rat_int(n as i64) * &theta * &theta <= rat_int(2) {
        return Err(SumsetError::HypothesisUnmet(format!(
            "n = {n} <= 2 * theta^-2"
        )));
    }
    let mut bound = Rational::one();
    for _ in 0..(2 * k - 3) {
        bound *= &theta;
    }
    for _ in 0..(k - 1) {
        bound *= rat_int(n as i64);
    }
    Ok(VarnavidesBound { theta, bound })
}

/// A seeded random instance for the representation-bound property run:
/// exact densities `theta_i` (in 64ths, ranges sized so an admissible prime
/// modulus below 500 always exists), a prime modulus drawn from `primes`,
/// and subsets of Z_n with `|X_i| = ceil(theta_i n)`.
pub fn random_dense_instance(
    k: usize,
    seed: u64,
    inst: u64,
    primes: &[u64],
) -> (Vec<Rational>, u64, Vec<ZnSet>) {
    assert!((2..=4).contains(&k), "property run covers k in 2..=4");
    let lo: i64 = match k {
        2 => 36,
        3 => 30,
        _ => 26,
    };
    let thetas: Vec<Rational> = (0..k)
        .map(|j| {
            let r = crate::rng::mix3(seed, inst * 8 + j as u64, k as u64);
            Rational::new(
                (lo + (r % (61 - lo as u64)) as i64).into(),
                64.into(),
            )
        })
        .collect();
    let total: Rational = thetas.iter().sum();
    let spread = (&total - Rational::one()) / rat_int((3 * k - 5) as i64);
    let theta = thetas.iter().fold(spread, |a, t| a.min(t.clone()));
    let min_n = rat_int(2) / (&theta * &theta);
    let candidates: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| rat_int(p as i64) > min_n && p <= 500)
        .collect();
    assert!(!candidates.is_empty(), "theta ranges guarantee a modulus");
    let n = candidates
        [(crate::rng::mix3(seed.wrapping_add(1), inst, k as u64) % candidates.len() as u64)
            as usize];
    let sets: Vec<ZnSet> = thetas
        .iter()
        .enumerate()
        .map(|(j, th)| {
            let size: u64 = (th * rat_int(n as i64))
                .ceil()
                .to_integer()
                .try_into()
                .unwrap();
            let mut pool: Vec<u64> = (0..n).collect();
            for i in 0..size as usize {
                let r = crate::rng::mix3(seed.wrapping_add(2) ^ inst, j as u64, i as u64);
                let swap = i + (r % (n - i as u64)) as usize;
                pool.swap(i, swap);
            }
            pool.truncate(size as usize);
            ZnSet::from_iter(n, pool).unwrap()
        })
        .collect();
    (thetas, n, sets)
}

/// Deterministic Miller-Rabin over the full u64 range.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // this witness set decides primality for every n < 2^64
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
