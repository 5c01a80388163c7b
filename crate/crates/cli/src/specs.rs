//! Textual subset specifications.
//!
//! Grammar (exclusions after `!` apply last):
//!   all
//!   empty
//!   mod<M>:<r1>[,<r2>...]      e.g. mod3:1
//!   random:<alpha>:<seed>      e.g. random:0.55:7
//!   file:<path>                subset JSON ({label, bound, primes})
//!   <spec>!<p1>[,<p2>...]      e.g. all!3 or random:0.55:7!2,3

use crate::formats::SubsetJson;
use anyhow::{bail, Context, Result};
use primesum_core::{PrimeSubset, PrimeTable};
use std::fs;
use std::path::Path;

pub fn parse_subset_spec(spec: &str, table: &PrimeTable) -> Result<PrimeSubset> {
    let (body, exclusions) = match spec.split_once('!') {
        Some((b, e)) => (b, parse_u64_list(e)?),
        None => (spec, Vec::new()),
    };
    let mut subset = parse_body(body.trim(), table)?;
    for p in exclusions {
        subset = subset.without(p);
    }
    Ok(subset)
}

fn parse_body(body: &str, table: &PrimeTable) -> Result<PrimeSubset> {
    if body == "all" {
        return Ok(PrimeSubset::all(table));
    }
    if body == "empty" {
        return Ok(PrimeSubset::empty(table));
    }
    if let Some(rest) = body.strip_prefix("mod") {
        let (m, residues) = rest
            .split_once(':')
            .with_context(|| format!("`{body}`: expected mod<M>:<r,...>"))?;
        let m: u64 = m.parse().with_context(|| format!("bad modulus in `{body}`"))?;
        if m == 0 {
            bail!("modulus must be positive in `{body}`");
        }
        let residues = parse_u64_list(residues)?;
        return Ok(PrimeSubset::congruence(table, m, &residues, body)?);
    }
    if let Some(rest) = body.strip_prefix("random:") {
        let (alpha, seed) = rest
            .split_once(':')
            .with_context(|| format!("`{body}`: expected random:<alpha>:<seed>"))?;
        let alpha: f64 = alpha
            .parse()
            .with_context(|| format!("bad density in `{body}`"))?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            bail!("density must lie in (0, 1] in `{body}`");
        }
        let seed: u64 = seed.parse().with_context(|| format!("bad seed in `{body}`"))?;
        return Ok(PrimeSubset::random_density(table, alpha, seed));
    }
    if let Some(path) = body.strip_prefix("file:") {
        return load_subset_json(Path::new(path), table);
    }
    bail!("unrecognized subset spec `{body}`")
}

pub fn load_subset_json(path: &Path, table: &PrimeTable) -> Result<PrimeSubset> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: SubsetJson =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if json.bound > table.bound() {
        bail!(
            "{}: subset bound {} exceeds table bound {}",
            path.display(),
            json.bound,
            table.bound()
        );
    }
    Ok(PrimeSubset::from_primes(table, json.primes, json.label)?)
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .with_context(|| format!("bad integer `{part}`"))
        })
        .collect()
}
