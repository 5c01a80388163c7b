//! Desk-scale instrumentation of the dense-model transfer pipeline on Z_N.
//!
//! Stages: small-prime cleanup modulus W and residue weights, residue
//! selection on Z_W^*, embedding into a prime-length cyclic group,
//! log-weighted indicators, Fourier superlevel sets, Bohr-set smoothing, and
//! the closing diagnostics. Counting identities (mass preservation, spectral
//! damping, Parseval) are asserted at 1e-9 relative; bounds that depend on
//! unspecified asymptotic constants are reported as ratios, never pass/fail.

use crate::modulus::SqfModulus;
use crate::rational::{dyadic_from_f64, rat, rat_int, to_f64, Rational};
use crate::residues::{select_residues_multi, ResidueError, ResidueWitness, WeightVector};
use crate::sieve::PrimeTable;
use crate::spectrum::{parseval_gap, Dft, SpectrumProfile};
use crate::subsets::PrimeSubset;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Relative tolerance for the float-side counting identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Quantization precision when measured densities enter exact arithmetic.
const WEIGHT_DYADIC_BITS: u32 = 48;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransferenceError {
    #[error("config invalid: {0}")]
    ConfigInvalid(String),
    #[error("stage `{stage}` failed: {message}")]
    Stage { stage: String, message: String },
    #[error("prime table bound {have} too small; need at least {need}")]
    TableTooSmall { need: u64, have: u64 },
    #[error("subset `{label}` has bound {have}, below the scan limit {need}")]
    SubsetTooSmall {
        label: String,
        need: u64,
        have: u64,
    },
    #[error("no prime in [{lo}, {hi}]; widen kappa")]
    NoPrimeInInterval { lo: u64, hi: u64 },
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// Pipeline parameters. `gamma = 2/k` is derived, not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferenceConfig {
    /// Target integer; must have the parity of k.
    pub n: u64,
    pub k: usize,
    pub kappa: Rational,
    pub delta: f64,
    pub epsilon: f64,
    /// Replacement for the computed cleanup modulus W; must be squarefree.
    /// At desk scale the computed W degenerates to 1, so exercising the
    /// residue-selection stage requires an override.
    pub w_override: Option<u64>,
}

impl TransferenceConfig {
    pub fn validate(&self) -> Result<(), TransferenceError> {
        let fail = |m: &str| Err(TransferenceError::ConfigInvalid(m.into()));
        if self.n < 16 {
            return fail("n must be at least 16");
        }
        if self.k < 4 {
            return fail("k must be at least 4");
        }
        if self.n % 2 != (self.k % 2) as u64 {
            return fail("n must be congruent to k mod 2");
        }
        if !self.kappa.is_positive() {
            return fail("kappa must be positive");
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            return fail("delta must lie in (0, 1)");
        }
        if !(0.0 < self.epsilon && self.epsilon < 1.0) {
            return fail("epsilon must lie in (0, 1)");
        }
        if let Some(w) = self.w_override {
            if SqfModulus::new(w.max(1)).is_err() || w == 0 {
                return fail("w_override must be a positive squarefree integer");
            }
        }
        Ok(())
    }

    /// `gamma_k = 2/k`.
    pub fn gamma(&self) -> Rational {
        rat(2, self.k as i64)
    }

    /// `floor(gamma_k * n)`: the summand budget per subset.
    pub fn gamma_n(&self) -> u64 {
        2 * self.n / self.k as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WtrickResult {
    /// `omega = (1/4) log log n`.
    pub omega: f64,
    /// Product of primes up to omega (or the override).
    pub w: u64,
    pub overridden: bool,
}

/// The small-prime cleanup modulus. At any feasible n the computed threshold
/// is below 2, so W = 1 unless overridden.
pub fn wtrick(n: u64, w_override: Option<u64>) -> WtrickResult {
    let omega = 0.25 * ((n as f64).ln()).ln();
    match w_override {
        Some(w) => WtrickResult {
            omega,
            w,
            overridden: true,
        },
        None => {
            let mut w = 1u64;
            let mut p = 2u64;
            while (p as f64) <= omega {
                if crate::sumsets::is_prime_u64(p) {
                    w *= p;
                }
                p += 1;
            }
            WtrickResult {
                omega,
                w,
                overridden: false,
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResidueWeights {
    pub weights: WeightVector,
    /// Raw (unclamped) densities per unit, for diagnostics.
    pub raw: Vec<f64>,
    /// How many classes hit the upper clamp at 1 (the asymptotic regime
    /// makes this vanish; at desk scale it is reported).
    pub clamped_high: usize,
}

/// Log-weighted prime density of `subset` in each unit class b mod W:
/// `f(b) = max(0, (phi(W)/(gamma n)) * sum_{x <= gamma n, x = b (W)} 1_P(x) log x - kappa)`,
/// clamped into [0, 1] and quantized to dyadic rationals for the exact
/// selection stage.
pub fn residue_weights(
    subset: &PrimeSubset,
    n: u64,
    w_mod: &SqfModulus,
    kappa: &Rational,
    k: usize,
) -> Result<ResidueWeights, TransferenceError> {
    let gamma_n = 2 * n / k as u64;
    if subset.bound() < gamma_n {
        return Err(TransferenceError::SubsetTooSmall {
            label: subset.label().to_string(),
            need: gamma_n,
            have: subset.bound(),
        });
    }
    let w = w_mod.q();
    let units = w_mod.units();
    let mut log_sums = vec![0.0f64; units.len()];
    for p in subset.primes().take_while(|&p| p <= gamma_n) {
        let b = if w == 1 { 0 } else { p % w };
        if let Ok(i) = units.binary_search(&b) {
            log_sums[i] += (p as f64).ln();
        }
    }
    let scale = w_mod.totient() as f64 / gamma_n as f64;
    let kappa_f = to_f64(kappa);
    let mut clamped_high = 0;
    let mut raw = Vec::with_capacity(units.len());
    let values: Vec<Rational> = log_sums
        .iter()
        .map(|&s| {
            let r = scale * s;
            raw.push(r);
            let f = (r - kappa_f).max(0.0);
            if f > 1.0 {
                clamped_high += 1;
            }
            dyadic_from_f64(f.min(1.0), WEIGHT_DYADIC_BITS)
        })
        .collect();
    let weights = WeightVector::new(w_mod.clone(), values)
        .expect("dyadic clamp keeps weights in range");
    Ok(ResidueWeights {
        weights,
        raw,
        clamped_high,
    })
}

/// Smallest prime N with `(1 + kappa) n / W <= N <= (1 + 2 kappa) n / W`.
pub fn choose_prime_modulus(
    n: u64,
    w: u64,
    kappa: &Rational,
    table: &PrimeTable,
) -> Result<u64, TransferenceError> {
    let n_over_w = rat_int(n as i64) / rat_int(w as i64);
    let lo_r = (Rational::one() + kappa) * &n_over_w;
    let hi_r = (Rational::one() + rat_int(2) * kappa) * &n_over_w;
    let lo = lo_r.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
    let hi = hi_r.floor().to_integer().to_u64().unwrap_or(u64::MAX);
    if hi > table.bound() {
        return Err(TransferenceError::TableTooSmall {
            need: hi,
            have: table.bound(),
        });
    }
    table
        .first_prime_in(lo, hi)
        .ok_or(TransferenceError::NoPrimeInInterval { lo, hi })
}

#[derive(Debug, Clone)]
pub struct WeightedIndicator {
    /// `a(x) = phi(W) log(Wx + b) / (W N)` on the embedded subset, else 0.
    pub values: Vec<f64>,
    /// Total mass alpha'.
    pub mass: f64,
    /// Largest support index, for the integer-lift check.
    pub support_max: Option<usize>,
}

/// Embed `P ∩ [1, gamma n]` into Z_N along the class `b mod W`, with the
/// logarithmic weight.
pub fn build_weighted_indicator(
    subset: &PrimeSubset,
    b: u64,
    w: u64,
    cap_n: u64,
    gamma_n: u64,
) -> WeightedIndicator {
    let mut values = vec![0.0f64; cap_n as usize];
    let mut mass = 0.0;
    let mut support_max = None;
    let denom = (w * cap_n) as f64;
    let phi_w = SqfModulus::new(w).map(|m| m.totient()).unwrap_or(1) as f64;
    for (x, slot) in values.iter_mut().enumerate() {
        let m = w * x as u64 + b;
        if m >= 2 && m <= gamma_n && subset.contains(m) {
            *slot = phi_w * (m as f64).ln() / denom;
            mass += *slot;
            support_max = Some(x);
        }
    }
    WeightedIndicator {
        values,
        mass,
        support_max,
    }
}

#[derive(Debug, Clone)]
pub struct BohrData {
    /// Frequencies where the spectrum is at least delta in magnitude.
    pub superlevel: Vec<usize>,
    /// `{x : ||x r / N|| <= epsilon for all r in the superlevel set}`.
    pub bohr: Vec<usize>,
    /// Uniform probability on the Bohr set.
    pub beta: Vec<f64>,
}

/// Superlevel frequencies of the spectrum and the Bohr set they cut out.
/// 0 always lies in the Bohr set, so beta is a genuine probability vector.
pub fn superlevel_and_bohr(spectrum: &SpectrumProfile, delta: f64, epsilon: f64) -> BohrData {
    let n = spectrum.n();
    let superlevel = spectrum.superlevel(delta);
    let bohr: Vec<usize> = (0..n)
        .filter(|&x| {
            superlevel.iter().all(|&r| {
                let frac = (x as u64 * r as u64) % n as u64;
                let d = frac as f64 / n as f64;
                d.min(1.0 - d) <= epsilon
            })
        })
        .collect();
    let mut beta = vec![0.0; n];
    let inv = 1.0 / bohr.len() as f64;
    for &x in &bohr {
        beta[x] = inv;
    }
    BohrData {
        superlevel,
        bohr,
        beta,
    }
}

/// Double Bohr smoothing `a * beta * beta` through the spectral product.
pub fn smooth(dft: &Dft, a: &[f64], beta: &[f64]) -> Vec<f64> {
    let once = dft.cyclic_convolve(a, beta);
    dft.cyclic_convolve(&once, beta)
}

/// Everything the pipeline measures, grouped by stage.
#[derive(Debug, Clone)]
pub struct TransferenceReport {
    pub n: u64,
    pub k: usize,
    pub kappa: Rational,
    pub delta: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub w: u64,
    pub w_overridden: bool,
    /// W = 1 makes residue selection vacuous; reported, not fatal.
    pub degenerate: bool,
    pub gamma_n: u64,
    pub weight_values: Vec<Vec<(u64, f64)>>,
    pub clamped_high: usize,
    /// Hypothesis constant fed to residue selection (midpoint between the
    /// lemma minimum and the measured mass ratio).
    pub selection_c: Option<Rational>,
    pub residue_witness: Option<ResidueWitness>,
    pub selected_classes: Vec<u64>,
    /// Exact value sum of the selected classes, and whether it clears
    /// (k+1)/2, the gate for the alpha'-sum bound.
    pub class_value_sum: Rational,
    pub alpha_gate: bool,
    pub cap_n: u64,
    pub n_prime: u64,
    pub alpha_primes: Vec<f64>,
    pub alpha_prime_sum: f64,
    /// Per-subset check alpha'_i >= kappa/k (asserted when f_i(b_i) > 0).
    pub alpha_lower_ok: bool,
    /// `1 + 1/k + kappa`.
    pub alpha_sum_bound: f64,
    /// Checked only when `alpha_gate` holds.
    pub alpha_sum_ok: bool,
    pub superlevel_sizes: Vec<usize>,
    pub bohr_sizes: Vec<usize>,
    pub mass_rel_err: f64,
    pub damping_excess: f64,
    pub parseval_err: f64,
    /// k-fold convolution at n' before and after smoothing, and the gap.
    pub conv_plain: f64,
    pub conv_smooth: f64,
    pub conv_diff: f64,
    /// `(epsilon^2 delta^{-5/2} + delta^{k/(k+1)}) / N`: the shape of the
    /// smoothing-error bound, constant unspecified.
    pub smoothing_rhs: f64,
    pub smoothing_ratio: f64,
    pub max_smooth_times_n: Vec<f64>,
    /// Level sets `{x : a'(x) >= alpha' kappa / N}`: size, required lower
    /// bound `alpha'(1-kappa)N/(1+kappa)`, and the comparison.
    pub level_sets: Vec<(usize, f64, bool)>,
    /// `(1/2) kappa^{2k} k^{3-2k} / N` and the measured counts against it.
    pub final_lower_bound: f64,
    pub final_ratio_plain: f64,
    pub final_ratio_smooth: f64,
    /// `k * max(support) < n' + N`, so Z_N representations lift to Z.
    pub lift_ok: bool,
    /// Conjunction of the 1e-9 identities (mass, damping, Parseval).
    pub identities_ok: bool,
}

/// Run the full pipeline for `k` subsets (pass the same subset k times for
/// the single-set reading).
pub fn transference_report(
    cfg: &TransferenceConfig,
    subsets: &[&PrimeSubset],
    table: &PrimeTable,
) -> Result<TransferenceReport, TransferenceError> {
    cfg.validate()?;
    let k = cfg.k;
    if subsets.len() != k {
        return Err(TransferenceError::ConfigInvalid(format!(
            "expected {k} subsets, got {}",
            subsets.len()
        )));
    }
    let stage = |s: &str, m: String| TransferenceError::Stage {
        stage: s.into(),
        message: m,
    };

    let wt = wtrick(cfg.n, cfg.w_override);
    let w = wt.w;
    let w_mod = SqfModulus::new(w)
        .map_err(|e| stage("wtrick", e.to_string()))?;
    let degenerate = w == 1;
    let gamma_n = cfg.gamma_n();

    // residue weights per subset
    let mut weight_sets = Vec::with_capacity(k);
    for (i, s) in subsets.iter().enumerate() {
        let rw = residue_weights(s, cfg.n, &w_mod, &cfg.kappa, k)?;
        if rw.weights.mass().is_zero() {
            return Err(stage(
                "residue_weights",
                format!("weight {i} (subset `{}`) is identically zero", s.label()),
            ));
        }
        weight_sets.push(rw);
    }
    let weight_values: Vec<Vec<(u64, f64)>> = weight_sets
        .iter()
        .map(|rw| {
            rw.weights
                .units()
                .iter()
                .zip(rw.weights.values())
                .map(|(&u, v)| (u, to_f64(v)))
                .collect()
        })
        .collect();
    let clamped_high = weight_sets.iter().map(|rw| rw.clamped_high).sum();

    // residue selection on Z_W^*
    let phi_w = w_mod.totient();
    let (selection_c, residue_witness, selected_classes) = if degenerate {
        (None, None, vec![0u64; k])
    } else {
        let total: Rational = weight_sets.iter().map(|rw| rw.weights.mass().clone()).sum();
        let min_c = rat((k + 1) as i64, 2 * k as i64);
        let max_c = &total / rat_int((k as u64 * phi_w) as i64);
        if max_c <= min_c {
            return Err(stage(
                "residue_selection",
                format!(
                    "total weight mass {} is at or below the density hypothesis",
                    crate::rational::display(&total)
                ),
            ));
        }
        let c = (&min_c + &max_c) / rat_int(2);
        let fs: Vec<WeightVector> = weight_sets.iter().map(|rw| rw.weights.clone()).collect();
        let witness = select_residues_multi(&fs, &c, cfg.n as i64)?;
        let classes = witness.residues.clone();
        (Some(c), Some(witness), classes)
    };

    let class_value_sum: Rational = selected_classes
        .iter()
        .zip(&weight_sets)
        .map(|(&b, rw)| rw.weights.value_at(b).cloned().unwrap_or_else(Rational::zero))
        .sum();
    let alpha_gate = class_value_sum > rat((k + 1) as i64, 2);

    // prime cyclic group and the shifted target
    let cap_n = choose_prime_modulus(cfg.n, w, &cfg.kappa, table)?;
    let class_sum: u64 = selected_classes.iter().sum();
    if class_sum > cfg.n {
        return Err(stage(
            "embedding",
            format!("selected classes sum {class_sum} exceeds n"),
        ));
    }
    debug_assert_eq!((cfg.n - class_sum) % w, 0, "congruence from the witness");
    let n_prime = (cfg.n - class_sum) / w;
    if n_prime >= cap_n {
        return Err(stage(
            "embedding",
            format!("n' = {n_prime} does not fit below N = {cap_n}"),
        ));
    }

    // weighted indicators
    let indicators: Vec<WeightedIndicator> = subsets
        .iter()
        .zip(&selected_classes)
        .map(|(s, &b)| build_weighted_indicator(s, b, w, cap_n, gamma_n))
        .collect();
    let alpha_primes: Vec<f64> = indicators.iter().map(|ind| ind.mass).collect();
    let alpha_prime_sum: f64 = alpha_primes.iter().sum();
    let kappa_f = to_f64(&cfg.kappa);
    let alpha_lower_ok = indicators
        .iter()
        .zip(&selected_classes)
        .zip(&weight_sets)
        .all(|((ind, &b), rw)| {
            let f_b = rw
                .weights
                .value_at(b)
                .cloned()
                .unwrap_or_else(Rational::zero);
            f_b.is_zero() || ind.mass >= kappa_f / k as f64
        });
    let alpha_sum_bound = 1.0 + 1.0 / k as f64 + kappa_f;
    let alpha_sum_ok = !alpha_gate || alpha_prime_sum >= alpha_sum_bound;

    // spectra, Bohr smoothing, identities
    let dft = Dft::new(cap_n as usize);
    let mut superlevel_sizes = Vec::with_capacity(k);
    let mut bohr_sizes = Vec::with_capacity(k);
    let mut spectra = Vec::with_capacity(k);
    let mut spectra_smooth = Vec::with_capacity(k);
    let mut smoothed = Vec::with_capacity(k);
    let mut mass_rel_err = 0.0f64;
    let mut damping_excess = 0.0f64;
    let mut parseval_err = 0.0f64;
    for ind in &indicators {
        let spec = dft.forward(&ind.values);
        parseval_err = parseval_err.max(parseval_gap(&ind.values, &spec));
        let bohr = superlevel_and_bohr(&spec, cfg.delta, cfg.epsilon);
        let a_smooth = smooth(&dft, &ind.values, &bohr.beta);
        let spec_smooth = dft.forward(&a_smooth);
        parseval_err = parseval_err.max(parseval_gap(&a_smooth, &spec_smooth));

        let mass_before: f64 = ind.values.iter().sum();
        let mass_after: f64 = a_smooth.iter().sum();
        if mass_before != 0.0 {
            mass_rel_err = mass_rel_err.max((mass_after - mass_before).abs() / mass_before);
        }
        for (c_s, c) in spec_smooth.coeffs().iter().zip(spec.coeffs()) {
            damping_excess = damping_excess.max(c_s.norm() - c.norm());
        }
        superlevel_sizes.push(bohr.superlevel.len());
        bohr_sizes.push(bohr.bohr.len());
        spectra.push(spec);
        spectra_smooth.push(spec_smooth);
        smoothed.push(a_smooth);
    }
    let identities_ok =
        mass_rel_err <= IDENTITY_TOL && damping_excess <= IDENTITY_TOL && parseval_err <= IDENTITY_TOL;

    // k-fold counts at n'
    let views: Vec<&SpectrumProfile> = spectra.iter().collect();
    let conv_plain = dft.kfold_at(&views, n_prime as usize);
    let views_s: Vec<&SpectrumProfile> = spectra_smooth.iter().collect();
    let conv_smooth = dft.kfold_at(&views_s, n_prime as usize);
    let conv_diff = (conv_plain - conv_smooth).abs();
    let nf = cap_n as f64;
    let smoothing_rhs = (cfg.epsilon.powi(2) * cfg.delta.powf(-2.5)
        + cfg.delta.powf(k as f64 / (k as f64 + 1.0)))
        / nf;
    let smoothing_ratio = if smoothing_rhs > 0.0 {
        conv_diff / smoothing_rhs
    } else {
        f64::INFINITY
    };

    let max_smooth_times_n: Vec<f64> = smoothed
        .iter()
        .map(|a| a.iter().cloned().fold(0.0, f64::max) * nf)
        .collect();

    let level_sets: Vec<(usize, f64, bool)> = smoothed
        .iter()
        .zip(&alpha_primes)
        .map(|(a, &alpha)| {
            let cut = alpha * kappa_f / nf;
            let size = a.iter().filter(|&&v| v >= cut).count();
            let bound = alpha * (1.0 - kappa_f) / (1.0 + kappa_f) * nf;
            (size, bound, size as f64 >= bound)
        })
        .collect();

    let final_lower_bound =
        0.5 * kappa_f.powi(2 * k as i32) * (k as f64).powi(3 - 2 * k as i32) / nf;
    let final_ratio_plain = conv_plain / final_lower_bound;
    let final_ratio_smooth = conv_smooth / final_lower_bound;

    let max_support = indicators
        .iter()
        .filter_map(|ind| ind.support_max)
        .max()
        .unwrap_or(0);
    let lift_ok = (k as u64) * (max_support as u64) < n_prime + cap_n;

    Ok(TransferenceReport {
        n: cfg.n,
        k,
        kappa: cfg.kappa.clone(),
        delta: cfg.delta,
        epsilon: cfg.epsilon,
        omega: wt.omega,
        w,
        w_overridden: wt.overridden,
        degenerate,
        gamma_n,
        weight_values,
        clamped_high,
        selection_c,
        residue_witness,
        selected_classes,
        class_value_sum,
        alpha_gate,
        cap_n,
        n_prime,
        alpha_primes,
        alpha_prime_sum,
        alpha_lower_ok,
        alpha_sum_bound,
        alpha_sum_ok,
        superlevel_sizes,
        bohr_sizes,
        mass_rel_err,
        damping_excess,
        parseval_err,
        conv_plain,
        conv_smooth,
        conv_diff,
        smoothing_rhs,
        smoothing_ratio,
        max_smooth_times_n,
        level_sets,
        final_lower_bound,
        final_ratio_plain,
        final_ratio_smooth,
        lift_ok,
        identities_ok,
    })
}
