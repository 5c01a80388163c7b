use crate::config::parse_transference_config;
use crate::formats::{self, RationalJson, ResidueWitnessJson, SCHEMA_VERSION};
use crate::specs::parse_subset_spec;
use anyhow::Result;
use primesum_core::{transference_report, wtrick, PrimeSubset, PrimeTable};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct LevelSetJson {
    size: usize,
    lower_bound: f64,
    meets_bound: bool,
}

#[derive(Serialize)]
struct TransferenceJson {
    schema_version: u32,
    n: u64,
    k: usize,
    kappa: RationalJson,
    delta: f64,
    epsilon: f64,
    omega: f64,
    w: u64,
    w_overridden: bool,
    degenerate: bool,
    gamma_n: u64,
    class_weights: Vec<Vec<(u64, f64)>>,
    clamped_high: usize,
    selection_c: Option<RationalJson>,
    residue_witness: Option<ResidueWitnessJson>,
    selected_classes: Vec<u64>,
    class_value_sum: RationalJson,
    alpha_gate: bool,
    cap_n: u64,
    n_prime: u64,
    alpha_primes: Vec<f64>,
    alpha_prime_sum: f64,
    alpha_lower_ok: bool,
    alpha_sum_bound: f64,
    alpha_sum_ok: bool,
    superlevel_sizes: Vec<usize>,
    bohr_sizes: Vec<usize>,
    mass_rel_err: f64,
    damping_excess: f64,
    parseval_err: f64,
    conv_plain: f64,
    conv_smooth: f64,
    conv_diff: f64,
    smoothing_rhs_shape: f64,
    smoothing_ratio: f64,
    max_smooth_times_n: Vec<f64>,
    level_sets: Vec<LevelSetJson>,
    final_lower_bound: f64,
    final_ratio_plain: f64,
    final_ratio_smooth: f64,
    lift_ok: bool,
    identities_ok: bool,
}

pub fn run(config_path: &Path) -> Result<bool> {
    let cfg = parse_transference_config(config_path)?;
    cfg.core.validate()?;

    // table must cover both the summand budget and the prime-hunt interval;
    // the pipeline re-checks the exact interval and errors if this is short
    let w = wtrick(cfg.core.n, cfg.core.w_override).w;
    let kappa_f = primesum_core::rational::to_f64(&cfg.core.kappa);
    let hi = ((1.0 + 2.0 * kappa_f) * cfg.core.n as f64 / w as f64).ceil() as u64 + 16;
    let bound = cfg.bound.unwrap_or_else(|| cfg.core.gamma_n().max(hi));
    let table = PrimeTable::sieve(bound)?;
    let subsets: Vec<PrimeSubset> = cfg
        .subset_specs
        .iter()
        .map(|spec| parse_subset_spec(spec, &table))
        .collect::<Result<_>>()?;
    let views: Vec<&PrimeSubset> = subsets.iter().collect();

    let r = transference_report(&cfg.core, &views, &table)?;
    let ok = r.identities_ok && r.alpha_sum_ok && r.alpha_lower_ok && r.lift_ok;
    formats::print_json(&TransferenceJson {
        schema_version: SCHEMA_VERSION,
        n: r.n,
        k: r.k,
        kappa: RationalJson::of(&r.kappa),
        delta: r.delta,
        epsilon: r.epsilon,
        omega: r.omega,
        w: r.w,
        w_overridden: r.w_overridden,
        degenerate: r.degenerate,
        gamma_n: r.gamma_n,
        class_weights: r.weight_values,
        clamped_high: r.clamped_high,
        selection_c: r.selection_c.as_ref().map(RationalJson::of),
        residue_witness: r.residue_witness.as_ref().map(ResidueWitnessJson::of),
        selected_classes: r.selected_classes,
        class_value_sum: RationalJson::of(&r.class_value_sum),
        alpha_gate: r.alpha_gate,
        cap_n: r.cap_n,
        n_prime: r.n_prime,
        alpha_primes: r.alpha_primes,
        alpha_prime_sum: r.alpha_prime_sum,
        alpha_lower_ok: r.alpha_lower_ok,
        alpha_sum_bound: r.alpha_sum_bound,
        alpha_sum_ok: r.alpha_sum_ok,
        superlevel_sizes: r.superlevel_sizes,
        bohr_sizes: r.bohr_sizes,
        mass_rel_err: r.mass_rel_err,
        damping_excess: r.damping_excess,
        parseval_err: r.parseval_err,
        conv_plain: r.conv_plain,
        conv_smooth: r.conv_smooth,
        conv_diff: r.conv_diff,
        smoothing_rhs_shape: r.smoothing_rhs,
        smoothing_ratio: r.smoothing_ratio,
        max_smooth_times_n: r.max_smooth_times_n,
        level_sets: r
            .level_sets
            .iter()
            .map(|&(size, lower_bound, meets_bound)| LevelSetJson {
                size,
                lower_bound,
                meets_bound,
            })
            .collect(),
        final_lower_bound: r.final_lower_bound,
        final_ratio_plain: r.final_ratio_plain,
        final_ratio_smooth: r.final_ratio_smooth,
        lift_ok: r.lift_ok,
        identities_ok: r.identities_ok,
    })?;
    Ok(ok)
}
