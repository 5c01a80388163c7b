//! Squarefree moduli, their unit groups, and the two-factor CRT maps.
//!
//! Everything downstream (residue selection, fiber averaging) identifies
//! `Z_q^*` with `Z_{q1}^* x Z_p^*` for a prime factor `p` of `q`; the two maps
//! here are that identification. Residues are canonical representatives in
//! `[0, q)` so equality tests are unambiguous.

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModulusError {
    #[error("{q} is not squarefree ({p}^2 divides it)")]
    NotSquarefree { q: u64, p: u64 },
    #[error("{p} is not a prime factor of {q}")]
    BadFactor { q: u64, p: u64 },
    #[error("moduli {a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },
}

/// A squarefree modulus together with its distinct prime factors and totient.
///
/// Invariants: the factors are strictly increasing primes whose product is
/// `q`, and `totient = prod (p - 1)`. `q = 1` is admitted with an empty
/// factorization and the single "unit" 0; that choice keeps recursion bases
/// trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqfModulus {
    q: u64,
    factors: Vec<u64>,
    totient: u64,
}

impl SqfModulus {
    /// Factor `q`, rejecting any repeated prime.
    pub fn new(q: u64) -> Result<Self, ModulusError> {
        assert!(q >= 1, "modulus must be positive");
        let mut factors = Vec::new();
        let mut totient = 1u64;
        let mut rest = q;
        let mut d = 2u64;
        while d * d <= rest {
            if rest % d == 0 {
                rest /= d;
                if rest % d == 0 {
                    return Err(ModulusError::NotSquarefree { q, p: d });
                }
                factors.push(d);
                totient *= d - 1;
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            factors.push(rest);
            totient *= rest - 1;
        }
        Ok(SqfModulus {
            q,
            factors,
            totient,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn totient(&self) -> u64 {
        self.totient
    }

    /// Number of prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn is_even(&self) -> bool {
        self.q % 2 == 0
    }

    /// True iff `x` in [0, q) is a unit. For q = 1 the single residue 0 counts.
    pub fn is_unit(&self, x: u64) -> bool {
        if self.q == 1 {
            x == 0
        } else {
            x < self.q && x.gcd(&self.q) == 1
        }
    }

    /// Strictly increasing units of `Z_q^*` (length = totient).
    pub fn units(&self) -> Vec<u64> {
        if self.q == 1 {
            return vec![0];
        }
        (1..self.q).filter(|&x| x.gcd(&self.q) == 1).collect()
    }

    /// The modulus with `p` removed.
    pub fn cofactor(&self, p: u64) -> Result<SqfModulus, ModulusError> {
        if !self.factors.contains(&p) {
            return Err(ModulusError::BadFactor { q: self.q, p });
        }
        SqfModulus::new(self.q / p)
    }
}

/// Reduce `x mod q` componentwise to `(x mod q/p, x mod p)`.
pub fn crt_split(x: u64, m: &SqfModulus, p: u64) -> Result<(u64, u64), ModulusError> {
    if !m.factors().contains(&p) {
        return Err(ModulusError::BadFactor { q: m.q(), p });
    }
    let q1 = m.q() / p;
    Ok((if q1 == 1 { 0 } else { x % q1 }, x % p))
}

/// The unique residue mod `q1 * p` congruent to `a` mod `q1` and `b` mod `p`.
pub fn crt_merge(a: u64, b: u64, q1: u64, p: u64) -> Result<u64, ModulusError> {
    if q1.gcd(&p) != 1 {
        return Err(ModulusError::NotCoprime { a: q1, b: p });
    }
    if q1 == 1 {
        return Ok(b % p);
    }
    if p == 1 {
        return Ok(a % q1);
    }
    let a = a % q1;
    let b = b % p;
    let inv = mod_inverse(q1 % p, p).expect("coprime moduli are invertible");
    let diff = (b + p - a % p) % p;
    let t = (diff as u128 * inv as u128 % p as u128) as u64;
    Ok(a + q1 * t)
}

/// Inverse of `a` mod `m` via extended Euclid; `None` if not coprime.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quotient = r0 / r1;
        (r0, r1) = (r1, r0 - quotient * r1);
        (t0, t1) = (t1, t0 - quotient * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_squarefree_inputs() {
        let one = SqfModulus::new(1).unwrap();
        assert_eq!(one.factors(), &[] as &[u64]);
        assert_eq!(one.totient(), 1);
        assert_eq!(one.units(), vec![0]);

        let m = SqfModulus::new(15).unwrap();
        assert_eq!(m.factors(), &[3, 5]);
        assert_eq!(m.totient(), 8);
        assert_eq!(m.units(), vec![1, 2, 4, 7, 8, 11, 13, 14]);
    }

    #[test]
    fn rejects_square_divisors() {
        assert_eq!(
            SqfModulus::new(12),
            Err(ModulusError::NotSquarefree { q: 12, p: 2 })
        );
        assert_eq!(
            SqfModulus::new(49),
            Err(ModulusError::NotSquarefree { q: 49, p: 7 })
        );
    }

    #[test]
    fn small_unit_groups() {
        assert_eq!(SqfModulus::new(3).unwrap().units(), vec![1, 2]);
        assert_eq!(SqfModulus::new(2).unwrap().units(), vec![1]);
    }

    #[test]
    fn split_and_merge_examples() {
        let m = SqfModulus::new(15).unwrap();
        assert_eq!(crt_split(7, &m, 5).unwrap(), (1, 2));
        let m6 = SqfModulus::new(6).unwrap();
        assert_eq!(crt_split(0, &m6, 3).unwrap(), (0, 0));
        assert_eq!(
            crt_split(11, &m6, 4),
            Err(ModulusError::BadFactor { q: 6, p: 4 })
        );

        assert_eq!(crt_merge(1, 2, 3, 5).unwrap(), 7);
        assert_eq!(crt_merge(0, 0, 3, 5).unwrap(), 0);
        assert_eq!(
            crt_merge(1, 1, 3, 6),
            Err(ModulusError::NotCoprime { a: 3, b: 6 })
        );
    }

    #[test]
    fn merge_inverts_split_for_all_small_squarefree_q() {
        for q in 1..=10_000u64 {
            let m = match SqfModulus::new(q) {
                Ok(m) => m,
                Err(_) => continue,
            };
            assert_eq!(m.units().len() as u64, m.totient());
            for &p in m.factors() {
                let q1 = q / p;
                for x in [0, 1, q / 2, q - 1] {
                    let (a, b) = crt_split(x, &m, p).unwrap();
                    assert_eq!(crt_merge(a, b, q1, p).unwrap(), x % q, "q={q} p={p} x={x}");
                }
            }
        }
    }

    #[test]
    fn totient_is_multiplicative_over_new_prime_factors() {
        for q1 in 1..200u64 {
            let m1 = match SqfModulus::new(q1) {
                Ok(m) => m,
                Err(_) => continue,
            };
            for p in [2u64, 3, 5, 7, 11, 13] {
                if q1 % p == 0 {
                    continue;
                }
                let m = SqfModulus::new(q1 * p).unwrap();
                assert_eq!(m.totient(), m1.totient() * (p - 1));
            }
        }
    }
}
