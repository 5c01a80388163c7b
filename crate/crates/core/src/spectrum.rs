//! Discrete Fourier analysis on Z_N in binary64.
//!
//! Convention: the forward transform is `f~(r) = sum_n f(n) e(-r n / N)`, so
//! the transform of a cyclic convolution is the pointwise product. The
//! inverse divides by N. Backed by rustfft (mixed-radix/Bluestein), which
//! handles the prime N this pipeline prefers.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Complex Fourier coefficients of a function on Z_N.
#[derive(Debug, Clone)]
pub struct SpectrumProfile {
    coeffs: Vec<Complex64>,
}

impl SpectrumProfile {
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, r: usize) -> Complex64 {
        self.coeffs[r % self.coeffs.len()]
    }

    /// The zero coefficient is the total mass.
    pub fn mass(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Frequencies with `|f~(r)| >= threshold`.
    pub fn superlevel(&self, threshold: f64) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() >= threshold)
            .map(|(r, _)| r)
            .collect()
    }
}

/// Forward/inverse plans for one length, reusable across the pipeline.
pub struct Dft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Dft {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut planner = FftPlanner::new();
        Dft {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward(&self, f: &[f64]) -> SpectrumProfile {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert_eq!(buf.len(), self.n);
        self.fwd.process(&mut buf);
        SpectrumProfile { coeffs: buf }
    }

    pub fn forward_complex(&self, f: &[Complex64]) -> SpectrumProfile {
        let mut buf = f.to_vec();
        assert_eq!(buf.len(), self.n);
        self.fwd.process(&mut buf);
        SpectrumProfile { coeffs: buf }
    }

    /// Inverse transform with the 1/N normalization.
    pub fn inverse(&self, s: &SpectrumProfile) -> Vec<Complex64> {
        let mut buf = s.coeffs.clone();
        assert_eq!(buf.len(), self.n);
        self.inv.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Cyclic convolution of real sequences via the spectral product.
    pub fn cyclic_convolve(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let sa = self.forward(a);
        let sb = self.forward(b);
        let prod = SpectrumProfile {
            coeffs: sa
                .coeffs
                .iter()
                .zip(&sb.coeffs)
                .map(|(x, y)| x * y)
                .collect(),
        };
        self.inverse(&prod).into_iter().map(|c| c.re).collect()
    }

    /// `(a_1 * ... * a_k)(t)` evaluated at one point through the spectra.
    pub fn kfold_at(&self, spectra: &[&SpectrumProfile], t: usize) -> f64 {
        let n = self.n;
        let mut prod: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
        for s in spectra {
            for (p, c) in prod.iter_mut().zip(&s.coeffs) {
                *p *= c;
            }
        }
        let back = self.inverse(&SpectrumProfile { coeffs: prod });
        back[t % n].re
    }
}

/// Relative Parseval gap: `|sum |f|^2 - (1/N) sum |f~|^2| / sum |f|^2`.
pub fn parseval_gap(f: &[f64], s: &SpectrumProfile) -> f64 {
    let time: f64 = f.iter().map(|x| x * x).sum();
    let freq: f64 = s.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / f.len() as f64;
    if time == 0.0 {
        freq.abs()
    } else {
        (time - freq).abs() / time
    }
}

/// Direct O(N^(k-1)) evaluation of the k-fold cyclic convolution at one
/// point. Test oracle for the spectral route on small N.
pub fn direct_kfold_at(vectors: &[Vec<f64>], t: usize) -> f64 {
    let k = vectors.len();
    let n = vectors[0].len();
    fn rec(vectors: &[Vec<f64>], j: usize, acc: f64, rem: usize, n: usize) -> f64 {
        if j + 1 == vectors.len() {
            return acc * vectors[j][rem];
        }
        let mut total = 0.0;
        for (x, &v) in vectors[j].iter().enumerate() {
            if v != 0.0 {
                let nr = (rem + n - x % n) % n;
                total += rec(vectors, j + 1, acc * v, nr, n);
            }
        }
        total
    }
    debug_assert!(k >= 1);
    rec(vectors, 0, 1.0, t % n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn randvec(n: usize, seed: u64) -> Vec<f64> {
        (0..n)
            .map(|i| crate::rng::unit_f64(seed, 17, i as u64) - 0.5)
            .collect()
    }

    #[test]
    fn delta_and_constant() {
        let dft = Dft::new(16);
        let mut delta = vec![0.0; 16];
        delta[0] = 1.0;
        let s = dft.forward(&delta);
        for r in 0..16 {
            assert!((s.coeff(r) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let flat = vec![1.0 / 16.0; 16];
        let s = dft.forward(&flat);
        assert!((s.mass().re - 1.0).abs() < 1e-12);
        for r in 1..16 {
            assert!(s.coeff(r).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_reconstructs() {
        for n in [8usize, 37, 101] {
            let dft = Dft::new(n);
            let f = randvec(n, n as u64);
            let s = dft.forward(&f);
            let back = dft.inverse(&s);
            for (x, y) in f.iter().zip(&back) {
                assert!((x - y.re).abs() < 1e-9 && y.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn parseval_on_random_input() {
        let dft = Dft::new(64);
        let f = randvec(64, 5);
        let s = dft.forward(&f);
        assert!(parseval_gap(&f, &s) < 1e-9);
    }

    #[test]
    fn convolution_theorem() {
        let n = 53;
        let dft = Dft::new(n);
        let a = randvec(n, 1);
        let b = randvec(n, 2);
        let via_fft = dft.cyclic_convolve(&a, &b);
        for t in 0..n {
            let direct: f64 = (0..n).map(|y| a[y] * b[(t + n - y) % n]).sum();
            assert!((via_fft[t] - direct).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn kfold_matches_direct() {
        let n = 31;
        let dft = Dft::new(n);
        let vecs: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                (0..n)
                    .map(|i| crate::rng::unit_f64(7, j, i as u64))
                    .collect()
            })
            .collect();
        let spectra: Vec<SpectrumProfile> = vecs.iter().map(|v| dft.forward(v)).collect();
        let views: Vec<&SpectrumProfile> = spectra.iter().collect();
        for t in [0usize, 5, 30] {
            let spectral = dft.kfold_at(&views, t);
            let direct = direct_kfold_at(&vecs, t);
            assert!(
                (spectral - direct).abs() < 1e-9 * direct.abs().max(1.0),
                "t={t}: {spectral} vs {direct}"
            );
        }
    }
}
