use crate::formats::{self, SubsetJson};
use crate::specs::parse_subset_spec;
use anyhow::{bail, Result};
use primesum_core::PrimeTable;
use std::path::PathBuf;

pub fn run(
    bound: u64,
    spec: &str,
    label: Option<String>,
    out: Option<PathBuf>,
    format: &str,
) -> Result<bool> {
    let table = PrimeTable::sieve(bound)?;
    let mut subset = parse_subset_spec(spec, &table)?;
    if let Some(label) = label {
        subset.set_label(label);
    }
    match format {
        "json" => {
            let json = SubsetJson::of(&subset);
            match out {
                Some(path) => formats::write_json(&path, &json)?,
                None => formats::print_json(&json)?,
            }
        }
        "bits" => {
            let Some(path) = out else {
                bail!("--format bits requires --out");
            };
            formats::write_subset_bits(&path, &subset)?;
        }
        other => bail!("unknown format `{other}` (expected json or bits)"),
    }
    Ok(true)
}
