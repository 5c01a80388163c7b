use crate::formats::{self, SCHEMA_VERSION};
use anyhow::Result;
use primesum_core::PrimeTable;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Serialize)]
struct SieveJson {
    schema_version: u32,
    bound: u64,
    prime_count: u64,
    path: String,
}

pub fn run(bound: u64, out: Option<PathBuf>) -> Result<bool> {
    let table = PrimeTable::sieve(bound)?;
    let path = out.unwrap_or_else(|| {
        let dir = std::env::var("PRIMESUM_CACHE").unwrap_or_else(|_| ".".into());
        PathBuf::from(dir).join(format!("primes_{bound}.bits"))
    });
    formats::write_prime_table(&path, &table)?;
    formats::print_json(&SieveJson {
        schema_version: SCHEMA_VERSION,
        bound,
        prime_count: table.prime_count(),
        path: path.display().to_string(),
    })?;
    Ok(true)
}
