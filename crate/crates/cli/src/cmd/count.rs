use crate::formats::{self, SCHEMA_VERSION};
use crate::specs::parse_subset_spec;
use anyhow::{bail, Result};
use primesum_core::{count_kfold, scan_representations, Parity, PrimeSubset, PrimeTable};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct CountJson {
    schema_version: u32,
    k: usize,
    n: u64,
    labels: Vec<String>,
    count: u64,
}

#[derive(Serialize)]
struct ScanJson {
    schema_version: u32,
    k: usize,
    labels: Vec<String>,
    lo: u64,
    hi: u64,
    parity: String,
    admissible: u64,
    zeros: u64,
    largest_zero: Option<u64>,
    min_count_after: Option<u64>,
    median_count_after: Option<u64>,
}

fn build_subsets(
    table: &PrimeTable,
    k: usize,
    specs: &[String],
) -> Result<Vec<PrimeSubset>> {
    let subsets: Vec<PrimeSubset> = match specs.len() {
        1 => vec![parse_subset_spec(&specs[0], table)?; k],
        m if m == k => specs
            .iter()
            .map(|s| parse_subset_spec(s, table))
            .collect::<Result<_>>()?,
        m => bail!("expected 1 or {k} subset specs, got {m}"),
    };
    Ok(subsets)
}

pub fn run_count(
    bound: u64,
    cached: Option<&Path>,
    k: usize,
    n: u64,
    specs: &[String],
) -> Result<bool> {
    let table = formats::obtain_table(bound, cached)?;
    let subsets = build_subsets(&table, k, specs)?;
    let views: Vec<&PrimeSubset> = subsets.iter().collect();
    let count = count_kfold(&views, n)?;
    formats::print_json(&CountJson {
        schema_version: SCHEMA_VERSION,
        k,
        n,
        labels: views.iter().map(|s| s.label().to_string()).collect(),
        count,
    })?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
pub fn run_scan(
    bound: u64,
    cached: Option<&Path>,
    k: usize,
    specs: &[String],
    min: u64,
    max: u64,
    parity: &str,
    csv: Option<PathBuf>,
    summary_path: Option<PathBuf>,
) -> Result<bool> {
    let parity = match parity {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        "all" => Parity::All,
        other => bail!("unknown parity `{other}`"),
    };
    let table = formats::obtain_table(bound, cached)?;
    let subsets = build_subsets(&table, k, specs)?;
    let views: Vec<&PrimeSubset> = subsets.iter().collect();
    let (rows, summary) = scan_representations(&views, min, max, parity)?;
    if let Some(path) = csv {
        formats::write_counts_csv(&path, &rows)?;
    }
    let json = ScanJson {
        schema_version: SCHEMA_VERSION,
        k: summary.k,
        labels: summary.labels.clone(),
        lo: summary.lo,
        hi: summary.hi,
        parity: summary.parity.as_str().to_string(),
        admissible: summary.admissible,
        zeros: summary.zeros,
        largest_zero: summary.largest_zero,
        min_count_after: summary.min_count_after,
        median_count_after: summary.median_count_after,
    };
    if let Some(path) = summary_path {
        formats::write_json(&path, &json)?;
    }
    formats::print_json(&json)?;
    Ok(true)
}
