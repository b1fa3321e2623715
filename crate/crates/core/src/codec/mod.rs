//! Conversion between traced silhouettes and Fourier-harmonic genomes.

mod curve;
mod fourier;
mod genome;
mod spline;

use serde::{Deserialize, Serialize};

pub use curve::{arc_length_params, reconstruction_error, ClosedCurve, CurveFile, Point};
pub use fourier::{decode, encode, normalize};
pub use genome::{Gene, Genome, GenomeFile};
pub use spline::densify;

use crate::{Error, Result};

/// Resolution settings of the encode/decode pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodecConfig {
    pub harmonic_count: usize,
    /// Spline points the traced outline is densified to before encoding.
    pub interpolated_point_count: usize,
    pub decode_precision: usize,
    pub decode_sample_count: usize,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            harmonic_count: 70,
            interpolated_point_count: 1500,
            decode_precision: 70,
            decode_sample_count: 1500,
        }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<()> {
        if self.harmonic_count < 1 {
            return Err(Error::Config("harmonic_count must be positive".into()));
        }
        if self.decode_precision < 1 || self.decode_precision > self.harmonic_count {
            return Err(Error::Config(format!(
                "decode_precision {} must lie in 1..={}",
                self.decode_precision, self.harmonic_count
            )));
        }
        if self.decode_sample_count < 3 || self.interpolated_point_count < 3 {
            return Err(Error::Config("point counts must be at least 3".into()));
        }
        Ok(())
    }

    /// Full ingestion of a hand-traced outline: counterclockwise orientation,
    /// densification, encoding and normalization.
    pub fn ingest(&self, traced: &ClosedCurve) -> Result<Genome> {
        self.validate()?;
        let oriented = traced.counterclockwise();
        let dense = densify(&oriented, self.interpolated_point_count)?;
        normalize(&encode(&dense, self.harmonic_count)?)
    }

    /// Phenotype of `genome` at the configured precision and sample count.
    pub fn render(&self, genome: &Genome) -> Result<ClosedCurve> {
        let precision = self.decode_precision.min(genome.harmonic_count());
        decode(genome, precision, self.decode_sample_count)
    }
}
