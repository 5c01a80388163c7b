//! Key-value config file for the transference pipeline.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys:
//!   n, k, kappa, delta, epsilon   required (kappa is an exact rational)
//!   w_override                    optional squarefree integer
//!   subset                        spec applied to every slot (default all)
//!   subset.1 .. subset.k          per-slot overrides
//!   bound                         prime-table bound (default: derived)

use anyhow::{bail, Context, Result};
use primesum_core::rational::parse_rational;
use primesum_core::TransferenceConfig;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct TransferenceFileConfig {
    pub core: TransferenceConfig,
    pub subset_specs: Vec<String>,
    pub bound: Option<u64>,
}

pub fn parse_transference_config(path: &Path) -> Result<TransferenceFileConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut pairs: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        pairs.insert(key.trim().to_string(), value.trim().to_string());
    }

    let required = |key: &str| -> Result<String> {
        pairs
            .get(key)
            .cloned()
            .with_context(|| format!("{}: missing key `{key}`", path.display()))
    };
    let n: u64 = required("n")?.parse().context("bad n")?;
    let k: usize = required("k")?.parse().context("bad k")?;
    let kappa = parse_rational(&required("kappa")?).context("bad kappa")?;
    let delta: f64 = required("delta")?.parse().context("bad delta")?;
    let epsilon: f64 = required("epsilon")?.parse().context("bad epsilon")?;
    let w_override = match pairs.get("w_override") {
        Some(v) => Some(v.parse::<u64>().context("bad w_override")?),
        None => None,
    };
    let bound = match pairs.get("bound") {
        Some(v) => Some(v.parse::<u64>().context("bad bound")?),
        None => None,
    };

    let default_spec = pairs
        .get("subset")
        .cloned()
        .unwrap_or_else(|| "all".to_string());
    let mut subset_specs = vec![default_spec; k];
    for (key, value) in &pairs {
        if let Some(idx) = key.strip_prefix("subset.") {
            let i: usize = idx
                .parse()
                .with_context(|| format!("bad subset index `{key}`"))?;
            if i == 0 || i > k {
                bail!("{}: subset index {i} out of 1..={k}", path.display());
            }
            subset_specs[i - 1] = value.clone();
        }
    }

    for key in pairs.keys() {
        let known = matches!(
            key.as_str(),
            "n" | "k" | "kappa" | "delta" | "epsilon" | "w_override" | "subset" | "bound"
        ) || key.starts_with("subset.");
        if !known {
            bail!("{}: unknown key `{key}`", path.display());
        }
    }

    Ok(TransferenceFileConfig {
        core: TransferenceConfig {
            n,
            k,
            kappa,
            delta,
            epsilon,
            w_override,
        },
        subset_specs,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_a_full_config() {
        let mut f = tempfileish("cfg1");
        writeln!(
            f,
            "# pipeline\nn = 100000\nk = 4\nkappa = 1/1000\ndelta = 0.2\nepsilon = 0.1\nw_override = 6\nsubset = all\nsubset.4 = mod3:1"
        )
        .unwrap();
        let path = f_path("cfg1");
        let cfg = parse_transference_config(&path).unwrap();
        assert_eq!(cfg.core.n, 100_000);
        assert_eq!(cfg.core.w_override, Some(6));
        assert_eq!(cfg.subset_specs[0], "all");
        assert_eq!(cfg.subset_specs[3], "mod3:1");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_indices() {
        let mut f = tempfileish("cfg2");
        writeln!(f, "n = 16\nk = 4\nkappa = 1\ndelta = 0.5\nepsilon = 0.5\nwat = 1").unwrap();
        assert!(parse_transference_config(&f_path("cfg2")).is_err());

        let mut f = tempfileish("cfg3");
        writeln!(
            f,
            "n = 16\nk = 4\nkappa = 1\ndelta = 0.5\nepsilon = 0.5\nsubset.5 = all"
        )
        .unwrap();
        assert!(parse_transference_config(&f_path("cfg3")).is_err());
    }

    fn tempfileish(name: &str) -> fs::File {
        fs::File::create(f_path(name)).unwrap()
    }

    fn f_path(name: &str) -> std::path::PathBuf {
        std::env::temp_dir().join(format!("primesum-config-test-{name}"))
    }
}
