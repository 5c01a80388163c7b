//! Command-line surface for the primesum machinery.
//!
//! Structured results go to stdout as JSON (tables as CSV); errors go to
//! stderr as a one-line JSON object. Exit status: 0 when the run completed
//! and every hard contract held, 1 when a checked contract was violated,
//! 2 on usage or computation errors. Randomized subcommands require an
//! explicit seed, so every run is reproducible byte for byte.

mod cmd;
mod config;
mod formats;
mod specs;

use clap::{Parser, Subcommand};
use formats::ErrorJson;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "primesum", version, about = "Exact k-fold prime-sum machinery", long_about = None)]
struct Cli {
    /// Cap the internal worker-thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a prime table and cache it as a bit-table file.
    Sieve {
        #[arg(long)]
        bound: u64,
        /// Output path (default: $PRIMESUM_CACHE/primes_<bound>.bits).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a prime subset from a spec and serialize it.
    Subset {
        #[arg(long)]
        bound: u64,
        /// all | empty | mod<M>:<r,..> | random:<alpha>:<seed> | file:<path>, with optional !p,q exclusions.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// json (primes list) or bits (bit-table file; requires --out).
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Exact ordered count of k-fold representations of one target.
    Count {
        #[arg(long)]
        bound: u64,
        /// Reuse a cached bit-table file (bound must match).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
        /// One spec (used k times) or k specs.
        #[arg(long = "subset", required = true)]
        subsets: Vec<String>,
    },
    /// Count every admissible target in a range and summarize coverage.
    Scan {
        #[arg(long)]
        bound: u64,
        /// Reuse a cached bit-table file (bound must match).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long = "subset", required = true)]
        subsets: Vec<String>,
        #[arg(long, default_value_t = 2)]
        min: u64,
        #[arg(long)]
        max: u64,
        /// even | odd | all
        #[arg(long, default_value = "even")]
        parity: String,
        /// Write the per-target table here as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the summary JSON here (also printed to stdout).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run one selection lemma on a JSON instance file.
    SelectLemma {
        /// 3.1 | 3.2 | 3.3 (aliases: single, sharp4, multi).
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Exhaustively verify a selector over a value grid.
    VerifyGrid {
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated rationals, e.g. 0,0.25,0.5,0.75,1.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u128,
    },
    /// Select residues on Z_q^* from a JSON weight file.
    SelectResidues {
        #[arg(long)]
        q: u64,
        /// Required with --single; otherwise derived from the weight list.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        c: String,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        weights: PathBuf,
        /// Treat the file as one weight function used k times.
        #[arg(long)]
        single: bool,
    },
    /// Check the sumset size inequality on given or random sets.
    CdCheck {
        #[arg(long)]
        p: Option<u64>,
        /// Semicolon-separated sets of comma-separated elements: "1,2;3,4".
        #[arg(long)]
        sets: Option<String>,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 1000)]
        instances: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 101)]
        max_p: u64,
        #[arg(long, default_value_t = 5)]
        max_k: usize,
    },
    /// Property run for the dense representation-count lower bound.
    Varnavides {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        instances: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Full pipeline report from a key-value config file.
    Transference {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit a sharpness family and verify its zero-count pattern.
    Sharpness {
        /// shifted-mod3 | empty-last
        #[arg(long)]
        kind: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        bound: u64,
        /// Residue class parameter for the shifted family.
        #[arg(long, default_value_t = 1)]
        shift: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            return fail(&anyhow::anyhow!(e));
        }
    }
    let outcome = match cli.command {
        Command::Sieve { bound, out } => cmd::sieve::run(bound, out),
        Command::Subset {
            bound,
            spec,
            label,
            out,
            format,
        } => cmd::subset::run(bound, &spec, label, out, &format),
        Command::Count {
            bound,
            table,
            k,
            n,
            subsets,
        } => cmd::count::run_count(bound, table.as_deref(), k, n, &subsets),
        Command::Scan {
            bound,
            table,
            k,
            subsets,
            min,
            max,
            parity,
            csv,
            summary,
        } => cmd::count::run_scan(bound, table.as_deref(), k, &subsets, min, max, &parity, csv, summary),
        Command::SelectLemma { lemma, instance } => cmd::lemma::run_select(&lemma, &instance),
        Command::VerifyGrid {
            lemma,
            n,
            k,
            grid,
            c,
            budget,
        } => cmd::lemma::run_grid(&lemma, n, k, &grid, &c, budget),
        Command::SelectResidues {
            q,
            k,
            c,
            n,
            weights,
            single,
        } => cmd::residues::run(q, k, &c, n, &weights, single),
        Command::CdCheck {
            p,
            sets,
            random,
            instances,
            seed,
            max_p,
            max_k,
        } => cmd::sumset::run_cd(p, sets.as_deref(), random, instances, seed, max_p, max_k),
        Command::Varnavides { k, instances, seed } => cmd::sumset::run_varnavides(k, instances, seed),
        Command::Transference { config } => cmd::transfer::run(&config),
        Command::Sharpness {
            kind,
            k,
            bound,
            shift,
        } => cmd::sharpness::run(&kind, k, bound, shift),
    };
    match outcome {
        Ok(contracts_held) => {
            if contracts_held {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &anyhow::Error) -> ExitCode {
    let payload = ErrorJson {
        schema_version: formats::SCHEMA_VERSION,
        error: format!("{e:#}"),
        kind: e
            .root_cause()
            .to_string()
            .split(':')
            .next()
            .unwrap_or("error")
            .to_string(),
    };
    eprintln!("{}", serde_json::to_string(&payload).unwrap());
    ExitCode::from(2)
}
