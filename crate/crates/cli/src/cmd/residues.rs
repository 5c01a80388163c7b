use crate::formats::{self, ResidueWitnessJson};
use anyhow::{bail, Context, Result};
use primesum_core::rational::{parse_rational, rat_int, Rational};
use primesum_core::{
    select_residues_multi, select_residues_single, SqfModulus, WeightVector,
};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

/// Weight file: either one map {"unit": "value", ...} (single route) or an
/// array of k such maps. Units not listed default to weight 0.
#[derive(Deserialize)]
#[serde(untagged)]
enum WeightFile {
    Single(BTreeMap<String, String>),
    Multi(Vec<BTreeMap<String, String>>),
}

fn weight_from_map(m: &SqfModulus, map: &BTreeMap<String, String>) -> Result<WeightVector> {
    let mut parsed: BTreeMap<u64, Rational> = BTreeMap::new();
    for (unit, value) in map {
        let u: u64 = unit
            .parse()
            .with_context(|| format!("bad unit key `{unit}`"))?;
        if !m.is_unit(u) {
            bail!("{u} is not a unit mod {}", m.q());
        }
        parsed.insert(u, parse_rational(value)?);
    }
    Ok(WeightVector::from_fn(m.clone(), |u| {
        parsed.get(&u).cloned().unwrap_or_else(|| rat_int(0))
    })?)
}

pub fn run(
    q: u64,
    k: Option<usize>,
    c: &str,
    n: i64,
    weights_path: &Path,
    single: bool,
) -> Result<bool> {
    let m = SqfModulus::new(q)?;
    let c = parse_rational(c)?;
    let text = std::fs::read_to_string(weights_path)
        .with_context(|| format!("reading {}", weights_path.display()))?;
    let file: WeightFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", weights_path.display()))?;

    let witness = match (single, file) {
        (true, WeightFile::Single(map)) => {
            let k = k.context("--single requires --k")?;
            let f = weight_from_map(&m, &map)?;
            select_residues_single(&f, k, &c, n)?
        }
        (true, WeightFile::Multi(_)) => bail!("--single expects one weight map, found an array"),
        (false, WeightFile::Multi(maps)) => {
            if let Some(k) = k {
                if k != maps.len() {
                    bail!("--k {k} disagrees with {} weight maps", maps.len());
                }
            }
            let fs: Vec<WeightVector> = maps
                .iter()
                .map(|map| weight_from_map(&m, map))
                .collect::<Result<_>>()?;
            select_residues_multi(&fs, &c, n)?
        }
        (false, WeightFile::Single(_)) => {
            bail!("found one weight map; pass --single (with --k) to use it for every summand")
        }
    };
    formats::print_json(&ResidueWitnessJson::of(&witness))?;
    Ok(witness.guaranteed_met)
}
