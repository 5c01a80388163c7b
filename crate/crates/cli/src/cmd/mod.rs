pub mod count;
pub mod lemma;
pub mod residues;
pub mod sharpness;
pub mod sieve;
pub mod subset;
pub mod sumset;
pub mod transfer;
