//! Exact acyclic convolution of nonnegative integer sequences.
//!
//! The fast path runs number-theoretic transforms over word-size prime moduli
//! and recombines residues by CRT; a direct quadratic path exists both as the
//! dispatch choice for short inputs and as an independent oracle. Results are
//! bit-exact or an error.
//!
//! Channel count is derived from the conservative coefficient bound
//! `min(len) * max(u) * max(v)`. Because the inputs are nonnegative, the
//! product of the two maxima always shows up inside some true coefficient, so
//! any instance whose bound would need a third prime channel has already
//! overflowed u64; two channels cover everything representable.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

/// NTT-friendly primes with large power-of-two roots of unity, paired with a
/// primitive root. Verified by the `moduli_are_ntt_primes` test.
const MODULI: [(u64, u64); 2] = [
    (18_446_744_069_414_584_321, 7), // 2^64 - 2^32 + 1, 2-adicity 32
    (4_179_340_454_199_820_289, 3),  // 29 * 2^57 + 1, 2-adicity 57
];

/// Longest supported transform; bounded by memory, not by the moduli.
pub const MAX_NTT_LEN: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvolveError {
    #[error("exact coefficient exceeds u64")]
    Overflow,
    #[error("convolution length {len} exceeds supported maximum {max}")]
    TooLarge { len: usize, max: usize },
}

/// Exact acyclic convolution, dispatching between the quadratic and NTT paths
/// on input size.
pub fn convolve_exact(u: &[u64], v: &[u64]) -> Result<Vec<u64>, ConvolveError> {
    if u.is_empty() || v.is_empty() {
        return Ok(Vec::new());
    }
    if u.len().min(v.len()) <= 32 {
        return convolve_quadratic(u, v);
    }
    convolve_ntt(u, v)
}

/// Schoolbook convolution with u128 accumulators; the independent oracle.
pub fn convolve_quadratic(u: &[u64], v: &[u64]) -> Result<Vec<u64>, ConvolveError> {
    if u.is_empty() || v.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = vec![0u128; u.len() + v.len() - 1];
    for (i, &a) in u.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in v.iter().enumerate() {
            let prod = (a as u128)
                .checked_mul(b as u128)
                .ok_or(ConvolveError::Overflow)?;
            out[i + j] = out[i + j].checked_add(prod).ok_or(ConvolveError::Overflow)?;
        }
    }
    out.into_iter()
        .map(|c| c.to_u64().ok_or(ConvolveError::Overflow))
        .collect()
}

/// Multi-prime NTT convolution.
pub fn convolve_ntt(u: &[u64], v: &[u64]) -> Result<Vec<u64>, ConvolveError> {
    if u.is_empty() || v.is_empty() {
        return Ok(Vec::new());
    }
    let out_len = u.len() + v.len() - 1;
    let size = out_len.next_power_of_two();
    if size > MAX_NTT_LEN {
        return Err(ConvolveError::TooLarge {
            len: size,
            max: MAX_NTT_LEN,
        });
    }

    let max_u = *u.iter().max().unwrap();
    let max_v = *v.iter().max().unwrap();
    if max_u != 0 && max_v != 0 && max_u.checked_mul(max_v).is_none() {
        // that product is itself a summand of some coefficient
        return Err(ConvolveError::Overflow);
    }
    let bound = BigUint::from(u.len().min(v.len())) * BigUint::from(max_u) * BigUint::from(max_v)
        + 1u32;
    let channels = if bound <= BigUint::from(MODULI[0].0) {
        1
    } else {
        debug_assert!(bound <= BigUint::from(MODULI[0].0) * BigUint::from(MODULI[1].0));
        2
    };

    let residues: Vec<Vec<u64>> = MODULI[..channels]
        .par_iter()
        .map(|&(p, g)| {
            let mut a: Vec<u64> = u.iter().map(|&x| x % p).collect();
            let mut b: Vec<u64> = v.iter().map(|&x| x % p).collect();
            a.resize(size, 0);
            b.resize(size, 0);
            ntt(&mut a, p, g, false);
            ntt(&mut b, p, g, false);
            for (x, y) in a.iter_mut().zip(&b) {
                *x = mulmod(*x, *y, p);
            }
            ntt(&mut a, p, g, true);
            a.truncate(out_len);
            a
        })
        .collect();

    if channels == 1 {
        return Ok(residues.into_iter().next().unwrap());
    }
    let (p0, p1) = (MODULI[0].0, MODULI[1].0);
    let inv_p0 = mod_pow(p0 % p1, p1 - 2, p1);
    residues[0]
        .iter()
        .zip(&residues[1])
        .map(|(&r0, &r1)| {
            // Garner: x = r0 + p0 * ((r1 - r0) * p0^{-1} mod p1)
            let d = submod(r1, r0 % p1, p1);
            let t = mulmod(d, inv_p0, p1);
            let x = r0 as u128 + p0 as u128 * t as u128;
            x.to_u64().ok_or(ConvolveError::Overflow)
        })
        .collect()
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn addmod(a: u64, b: u64, p: u64) -> u64 {
    // p may exceed 2^63, so watch for wraparound
    let (s, wrapped) = a.overflowing_add(b);
    if wrapped || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a.wrapping_sub(b).wrapping_add(p)
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Iterative radix-2 transform in place; `len` must be a power of two
/// dividing the 2-adic part of `p - 1`.
fn ntt(v: &mut [u64], p: u64, g: u64, invert: bool) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    debug_assert!((p - 1) % n as u64 == 0);
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            v.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = mod_pow(g, (p - 1) / len as u64, p);
        if invert {
            w = mod_pow(w, p - 2, p);
        }
        for block in v.chunks_mut(len) {
            let (lo, hi) = block.split_at_mut(len / 2);
            let mut cur = 1u64;
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let t = mulmod(*b, cur, p);
                *b = submod(*a, t, p);
                *a = addmod(*a, t, p);
                cur = mulmod(cur, w, p);
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = mod_pow(n as u64, p - 2, p);
        for x in v.iter_mut() {
            *x = mulmod(*x, n_inv, p);
        }
    }
}
