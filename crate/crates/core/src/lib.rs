//! Exact machinery for representing integers as k-fold sums of primes drawn
//! from dense subsets.
//!
//! The crate has three layers:
//!
//! * arithmetic substrate — squarefree moduli and their unit groups
//!   ([`modulus`]), a segmented prime sieve ([`sieve`]), and prime subsets
//!   with density bookkeeping ([`subsets`]);
//! * exact selection — combinatorial selectors over nonincreasing sequences
//!   ([`selection`]), residue selection over `Z_q^*` by fiberwise recursion
//!   ([`residues`]), cyclic sumset arithmetic ([`sumsets`]), and k-fold
//!   representation counting by exact integer convolution ([`ntt`],
//!   [`counting`]);
//! * spectral instrumentation — a DFT wrapper ([`spectrum`]) and the
//!   weighted-indicator smoothing pipeline on `Z_N` ([`transference`]).
//!
//! Everything that feeds a witness or a count uses exact integer or rational
//! arithmetic; floats appear only in the spectral layer, with stated
//! tolerances.

pub mod counting;
pub mod modulus;
pub mod ntt;
pub mod rational;
pub mod residues;
pub mod rng;
pub mod selection;
pub mod sieve;
pub mod spectrum;
pub mod subsets;
pub mod sumsets;
pub mod transference;

pub use counting::{count_kfold, representation_table, scan_representations, Parity, ScanSummary};
pub use modulus::{crt_merge, crt_split, ModulusError, SqfModulus};
pub use ntt::{convolve_exact, convolve_ntt, convolve_quadratic, ConvolveError};
pub use rational::Rational;
pub use residues::{
    brute_force_residue_table, brute_force_residues, fiber_average, prime_base_case,
    select_residues_multi, select_residues_single, ResidueBranch, ResidueError, ResidueWitness,
    WeightVector,
};
pub use selection::{
    brute_force_select, grid_verify, select_multi, select_sharp4, select_single, GridReport,
    SelectionError, SelectionWitness, SelectorKind, ValueSequence,
};
pub use sieve::{PrimeTable, SieveError};
pub use spectrum::{Dft, SpectrumProfile};
pub use subsets::{residue_obstructions, sharpness_family, FamilyKind, PrimeSubset, SubsetError};
pub use sumsets::{
    cauchy_davenport_check, count_representations_modn, nu_at, random_dense_instance, sumset,
    varnavides_bound, CdReport, SumsetError, VarnavidesBound, ZnSet,
};
pub use transference::{
    build_weighted_indicator, choose_prime_modulus, residue_weights, smooth, superlevel_and_bohr,
    transference_report, wtrick, TransferenceConfig, TransferenceError, TransferenceReport,
};
