//! Evolutionary design of closed 2D silhouettes.
//!
//! Traced outlines are densified with a cyclic cubic spline, expanded into
//! complex Fourier harmonics and used as genomes by an interactive genetic
//! algorithm. Fitness comes from a human grader or from a calibrated
//! similarity index that compares the first harmonics of two genomes.
//!
//! The crate is organised by concern:
//!
//! * [`codec`]: curves, spline densification, Fourier encode/decode, normalization.
//! * [`engine`]: population lifecycle (selection, crossover, mutation, killing).
//! * [`similarity`]: the per-gene distance and the similarity index.
//! * [`calibration`]: fitting the index parameters from iso-similarity judgments.
//! * [`harness`]: automated experiments and convergence metrics.
//! * [`session`]: event-sourced session state with deterministic replay.
//! * [`corpus`]: a deterministic sample corpus of traced car silhouettes.

pub mod calibration;
pub mod codec;
pub mod corpus;
pub mod engine;
mod error;
pub mod harness;
pub mod session;
pub mod similarity;

pub use error::{Error, Result};

pub use codec::{ClosedCurve, CodecConfig, Genome};
pub use engine::{GaConfig, Individual, IndividualId, Population};
pub use similarity::{CoefficientBounds, SimilarityModel, SimilarityParams};

/// Deterministic random source used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's deterministic generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
