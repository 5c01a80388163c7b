//! File formats and JSON shapes shared by the subcommands.
//!
//! Bit-table file: an 8-byte little-endian bound header followed by the raw
//! bit vector (bit `m` of byte `m / 8` marks `m` as a member). Subsets and
//! full prime tables share the layout.
//!
//! Every JSON document carries `schema_version`.

use anyhow::{bail, Context, Result};
use primesum_core::rational::{display, to_f64, Rational};
use primesum_core::{PrimeSubset, PrimeTable, ResidueWitness, SelectionWitness};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

pub fn write_prime_table(path: &Path, table: &PrimeTable) -> Result<()> {
    let mut buf = Vec::with_capacity(8 + table.bit_bytes().len());
    buf.extend_from_slice(&table.bound().to_le_bytes());
    buf.extend_from_slice(table.bit_bytes());
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_prime_table(path: &Path) -> Result<PrimeTable> {
    let buf = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if buf.len() < 8 {
        bail!("{}: too short for a bit-table file", path.display());
    }
    let bound = u64::from_le_bytes(buf[..8].try_into().unwrap());
    Ok(PrimeTable::from_bit_bytes(bound, buf[8..].to_vec())?)
}

/// Load a cached table when one is given (its bound must match exactly, so
/// subset bounds stay consistent), otherwise sieve.
pub fn obtain_table(bound: u64, cached: Option<&Path>) -> Result<PrimeTable> {
    match cached {
        Some(path) => {
            let table = read_prime_table(path)?;
            if table.bound() != bound {
                bail!(
                    "{}: cached bound {} but --bound {bound}; rebuild with `sieve`",
                    path.display(),
                    table.bound()
                );
            }
            Ok(table)
        }
        None => Ok(PrimeTable::sieve(bound)?),
    }
}

pub fn write_subset_bits(path: &Path, subset: &PrimeSubset) -> Result<()> {
    let mut buf = Vec::with_capacity(8 + subset.bit_bytes().len());
    buf.extend_from_slice(&subset.bound().to_le_bytes());
    buf.extend_from_slice(subset.bit_bytes());
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Exact rational rendered as `num/den`, with a float view for plotting.
#[derive(Debug, Serialize, Deserialize)]
pub struct RationalJson {
    pub exact: String,
    pub approx: f64,
}

impl RationalJson {
    pub fn of(r: &Rational) -> Self {
        RationalJson {
            exact: display(r),
            approx: to_f64(r),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubsetJson {
    pub schema_version: u32,
    pub label: String,
    pub bound: u64,
    pub count: u64,
    pub density: f64,
    pub primes: Vec<u64>,
}

impl SubsetJson {
    pub fn of(s: &PrimeSubset) -> Self {
        SubsetJson {
            schema_version: SCHEMA_VERSION,
            label: s.label().to_string(),
            bound: s.bound(),
            count: s.len(),
            density: s.density_f64(),
            primes: s.primes().collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SelectionWitnessJson {
    pub schema_version: u32,
    pub indices: Vec<usize>,
    pub index_sum: usize,
    pub value_sum: RationalJson,
    pub threshold: RationalJson,
    pub all_positive: bool,
    pub meets_threshold: bool,
}

impl SelectionWitnessJson {
    pub fn of(w: &SelectionWitness) -> Self {
        SelectionWitnessJson {
            schema_version: SCHEMA_VERSION,
            indices: w.indices.clone(),
            index_sum: w.index_sum,
            value_sum: RationalJson::of(&w.value_sum),
            threshold: RationalJson::of(&w.threshold),
            all_positive: w.all_positive,
            meets_threshold: w.meets_threshold(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ResidueWitnessJson {
    pub schema_version: u32,
    pub q: u64,
    pub k: usize,
    pub n: u64,
    pub residues: Vec<u64>,
    pub value_sum: RationalJson,
    pub threshold: RationalJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_threshold: Option<RationalJson>,
    pub guaranteed: RationalJson,
    pub threshold_met: bool,
    pub guaranteed_met: bool,
    pub branch: String,
    pub via_fallback: bool,
}

impl ResidueWitnessJson {
    pub fn of(w: &ResidueWitness) -> Self {
        ResidueWitnessJson {
            schema_version: SCHEMA_VERSION,
            q: w.modulus,
            k: w.k,
            n: w.target,
            residues: w.residues.clone(),
            value_sum: RationalJson::of(&w.value_sum),
            threshold: RationalJson::of(&w.threshold),
            alt_threshold: w.alt_threshold.as_ref().map(RationalJson::of),
            guaranteed: RationalJson::of(&w.guaranteed),
            threshold_met: w.threshold_met,
            guaranteed_met: w.guaranteed_met,
            branch: w.branch.as_str().to_string(),
            via_fallback: w.via_fallback,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorJson {
    pub schema_version: u32,
    pub error: String,
    pub kind: String,
}

/// Write `n,count` rows with a schema comment header.
pub fn write_counts_csv(path: &Path, rows: &[(u64, u64)]) -> Result<()> {
    let mut out = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    writeln!(out, "# schema_version: {SCHEMA_VERSION}")?;
    writeln!(out, "n,count")?;
    for (n, c) in rows {
        writeln!(out, "{n},{c}")?;
    }
    Ok(())
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file =
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    Ok(())
}
