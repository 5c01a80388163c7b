use crate::formats::{self, SCHEMA_VERSION};
use anyhow::{bail, Result};
use primesum_core::{
    representation_table, residue_obstructions, sharpness_family, FamilyKind, PrimeSubset,
    PrimeTable,
};
use serde::Serialize;

#[derive(Serialize)]
struct SharpnessJson {
    schema_version: u32,
    kind: String,
    k: usize,
    bound: u64,
    labels: Vec<String>,
    density_sum: f64,
    /// Residue classes mod 3 with no representable targets, computed from
    /// the subsets' residue supports.
    obstructed_classes: Vec<u64>,
    /// Exact verification over the scan range: every target in an
    /// obstructed class has count zero.
    scanned_to: u64,
    blocked_targets: u64,
    violations: u64,
    /// For the all-blocking family this equals the scan length.
    zero_counts_total: u64,
}

pub fn run(kind: &str, k: usize, bound: u64, shift: u64) -> Result<bool> {
    let family_kind = match kind {
        "shifted-mod3" => FamilyKind::ShiftedMod3 { residue: shift },
        "empty-last" => FamilyKind::EmptyLast,
        other => bail!("unknown family `{other}` (expected shifted-mod3 or empty-last)"),
    };
    let table = PrimeTable::sieve(bound)?;
    let family = sharpness_family(family_kind, k, &table)?;
    let obstructed = residue_obstructions(&family, 3);
    let views: Vec<&PrimeSubset> = family.iter().collect();
    let counts = representation_table(&views, bound)?;

    let mut blocked_targets = 0u64;
    let mut violations = 0u64;
    let mut zero_counts_total = 0u64;
    for (n, &count) in counts.iter().enumerate() {
        if count == 0 {
            zero_counts_total += 1;
        }
        if obstructed.contains(&(n as u64 % 3)) {
            blocked_targets += 1;
            if count != 0 {
                violations += 1;
            }
        }
    }
    let ok = violations == 0;
    formats::print_json(&SharpnessJson {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        k,
        bound,
        labels: family.iter().map(|s| s.label().to_string()).collect(),
        density_sum: family.iter().map(|s| s.density_f64()).sum(),
        obstructed_classes: obstructed,
        scanned_to: bound,
        blocked_targets,
        violations,
        zero_counts_total,
    })?;
    Ok(ok)
}
