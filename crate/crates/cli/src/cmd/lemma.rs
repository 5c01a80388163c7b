use crate::formats::{self, RationalJson, SelectionWitnessJson, SCHEMA_VERSION};
use anyhow::{bail, Context, Result};
use primesum_core::rational::parse_rational;
use primesum_core::{
    grid_verify, select_multi, select_sharp4, select_single, SelectorKind, ValueSequence,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

fn parse_kind(lemma: &str) -> Result<SelectorKind> {
    Ok(match lemma {
        "3.1" | "single" => SelectorKind::Single,
        "3.2" | "sharp4" => SelectorKind::Sharp4,
        "3.3" | "multi" => SelectorKind::Multi,
        other => bail!("unknown lemma `{other}` (expected 3.1, 3.2, or 3.3)"),
    })
}

/// Instance file: {"c": "37/50", "k": 4, "columns": [["1", "1/2"], ...]}.
/// The single selector reads one column and picks k times; the others read
/// one column per summand.
#[derive(Deserialize)]
struct InstanceFile {
    c: String,
    #[serde(default)]
    k: Option<usize>,
    columns: Vec<Vec<String>>,
    /// Accept odd-length sequences in the single selector.
    #[serde(default)]
    allow_odd: bool,
}

pub fn run_select(lemma: &str, instance: &Path) -> Result<bool> {
    let kind = parse_kind(lemma)?;
    let text = std::fs::read_to_string(instance)
        .with_context(|| format!("reading {}", instance.display()))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", instance.display()))?;
    let c = parse_rational(&file.c)?;
    let columns: Vec<ValueSequence> = file
        .columns
        .iter()
        .map(|col| {
            let vals = col
                .iter()
                .map(|s| parse_rational(s).map_err(anyhow::Error::from))
                .collect::<Result<Vec<_>>>()?;
            ValueSequence::new(vals).map_err(anyhow::Error::from)
        })
        .collect::<Result<_>>()?;

    let witness = match kind {
        SelectorKind::Single => {
            if columns.len() != 1 {
                bail!("the single selector expects exactly one column");
            }
            let k = file.k.context("the single selector needs `k`")?;
            select_single(&columns[0], k, &c, file.allow_odd)?
        }
        SelectorKind::Sharp4 => {
            let cols: [ValueSequence; 4] = columns
                .try_into()
                .map_err(|_| anyhow::anyhow!("the sharp selector expects four columns"))?;
            select_sharp4(&cols, &c)?
        }
        SelectorKind::Multi => select_multi(&columns, &c)?,
    };
    formats::print_json(&SelectionWitnessJson::of(&witness))?;
    Ok(witness.meets_threshold())
}

#[derive(Serialize)]
struct GridFailureJson {
    instance: u64,
    matrix: Vec<Vec<String>>,
    reason: String,
}

#[derive(Serialize)]
struct GridReportJson {
    schema_version: u32,
    lemma: String,
    n: usize,
    k: usize,
    c: RationalJson,
    grid: Vec<String>,
    instances_checked: u64,
    hypothesis_hits: u64,
    failures: Vec<GridFailureJson>,
}

pub fn run_grid(lemma: &str, n: usize, k: usize, grid: &str, c: &str, budget: u128) -> Result<bool> {
    let kind = parse_kind(lemma)?;
    let c = parse_rational(c)?;
    let levels = grid
        .split(',')
        .map(|s| parse_rational(s).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let report = grid_verify(kind, n, k, &levels, &c, budget)?;
    let ok = report.failures.is_empty();
    formats::print_json(&GridReportJson {
        schema_version: SCHEMA_VERSION,
        lemma: lemma.to_string(),
        n: report.n,
        k: report.k,
        c: RationalJson::of(&report.c),
        grid: report.grid.iter().map(primesum_core::rational::display).collect(),
        instances_checked: report.instances_checked,
        hypothesis_hits: report.hypothesis_hits,
        failures: report
            .failures
            .into_iter()
            .map(|f| GridFailureJson {
                instance: f.instance,
                matrix: f.matrix,
                reason: f.reason,
            })
            .collect(),
    })?;
    Ok(ok)
}
