use crate::formats::{self, SCHEMA_VERSION};
use anyhow::{bail, Context, Result};
use primesum_core::rational::rat_int;
use primesum_core::{
    cauchy_davenport_check, count_representations_modn, random_dense_instance, rng,
    varnavides_bound, PrimeTable, ZnSet,
};
use serde::Serialize;

#[derive(Serialize)]
struct CdInstanceJson {
    p: u64,
    sizes: Vec<u64>,
    lhs: u64,
    rhs: u64,
    holds: bool,
}

#[derive(Serialize)]
struct CdJson {
    schema_version: u32,
    instances: u64,
    violations: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violating: Vec<CdInstanceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    single: Option<CdInstanceJson>,
}

pub fn run_cd(
    p: Option<u64>,
    sets: Option<&str>,
    random: bool,
    instances: u64,
    seed: Option<u64>,
    max_p: u64,
    max_k: usize,
) -> Result<bool> {
    if random {
        let seed = seed.context("--random requires --seed")?;
        let primes: Vec<u64> = PrimeTable::sieve(max_p.max(3))?
            .primes()
            .filter(|&p| p >= 3 && p <= max_p)
            .collect();
        if primes.is_empty() {
            bail!("no odd primes at or below {max_p}");
        }
        let mut violating = Vec::new();
        for i in 0..instances {
            let p = primes[(rng::mix3(seed, 0, i) % primes.len() as u64) as usize];
            let k = 2 + (rng::mix3(seed, 1, i) as usize) % (max_k.max(2) - 1);
            let zsets: Vec<ZnSet> = (0..k)
                .map(|j| {
                    let keep = 1 + rng::mix3(seed, 2 + j as u64, i) % p;
                    let s = ZnSet::from_iter(
                        p,
                        (0..p).filter(|&x| rng::mix3(seed ^ 0xC0FFEE, i * 8 + j as u64, x) % p < keep),
                    )
                    .unwrap();
                    if s.is_empty() {
                        ZnSet::from_iter(p, [i % p]).unwrap()
                    } else {
                        s
                    }
                })
                .collect();
            let r = cauchy_davenport_check(p, &zsets)?;
            if !r.holds {
                violating.push(CdInstanceJson {
                    p: r.p,
                    sizes: r.sizes,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    holds: r.holds,
                });
            }
        }
        let ok = violating.is_empty();
        formats::print_json(&CdJson {
            schema_version: SCHEMA_VERSION,
            instances,
            violations: violating.len() as u64,
            violating,
            single: None,
        })?;
        return Ok(ok);
    }

    let p = p.context("pass --p with --sets, or use --random")?;
    let sets = sets.context("pass --sets, or use --random")?;
    let zsets: Vec<ZnSet> = sets
        .split(';')
        .map(|group| {
            let elems = group
                .split(',')
                .map(|s| s.trim().parse::<u64>().context("bad element"))
                .collect::<Result<Vec<_>>>()?;
            ZnSet::from_iter(p, elems).map_err(anyhow::Error::from)
        })
        .collect::<Result<_>>()?;
    let r = cauchy_davenport_check(p, &zsets)?;
    let ok = r.holds;
    formats::print_json(&CdJson {
        schema_version: SCHEMA_VERSION,
        instances: 1,
        violations: u64::from(!r.holds),
        violating: Vec::new(),
        single: Some(CdInstanceJson {
            p: r.p,
            sizes: r.sizes,
            lhs: r.lhs,
            rhs: r.rhs,
            holds: r.holds,
        }),
    })?;
    Ok(ok)
}

#[derive(Serialize)]
struct VarnavidesJson {
    schema_version: u32,
    k: usize,
    instances: u64,
    targets_checked: u64,
    violations: u64,
    /// Smallest observed nu(t) / bound ratio across all targets.
    min_ratio: f64,
}

pub fn run_varnavides(k: usize, instances: u64, seed: u64) -> Result<bool> {
    if !(2..=4).contains(&k) {
        bail!("the property run covers k in 2..=4");
    }
    let table = PrimeTable::sieve(500)?;
    let primes: Vec<u64> = table.primes().collect();
    let mut targets_checked = 0u64;
    let mut violations = 0u64;
    let mut min_ratio = f64::INFINITY;
    for inst in 0..instances {
        let (thetas, n, sets) = random_dense_instance(k, seed, inst, &primes);
        let bound = varnavides_bound(&thetas, n)?;
        let nu = count_representations_modn(&sets)?;
        let bound_f = primesum_core::rational::to_f64(&bound.bound);
        for &count in &nu {
            targets_checked += 1;
            if rat_int(count as i64) < bound.bound {
                violations += 1;
            }
            min_ratio = min_ratio.min(count as f64 / bound_f);
        }
    }
    let ok = violations == 0;
    formats::print_json(&VarnavidesJson {
        schema_version: SCHEMA_VERSION,
        k,
        instances,
        targets_checked,
        violations,
        min_ratio,
    })?;
    Ok(ok)
}
