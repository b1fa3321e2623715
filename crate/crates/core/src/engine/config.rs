use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Genetic algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    /// Fraction of the population replaced by children each generation.
    pub turnover_rate: f64,
    /// Per-gene probability of mutation (genes `m >= 1`).
    pub mutation_probability: f64,
    /// Bounds of the multiplicative factor magnitude applied to a mutated gene.
    pub mutation_factor_range: (f64, f64),
    /// Negate the factor with probability 1/2.
    pub mutation_sign_flip: bool,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            turnover_rate: 0.7,
            mutation_probability: 0.05,
            mutation_factor_range: (0.5, 2.0),
            mutation_sign_flip: true,
            rng_seed: 0,
        }
    }
}

impl GaConfig {
    /// Settings used when a similarity oracle plays the designer.
    pub fn automated() -> Self {
        GaConfig {
            mutation_probability: 0.3,
            ..GaConfig::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Individuals kept from the parent generation: `round(size * (1 - turnover))`.
    pub fn survivor_count(&self) -> usize {
        (self.population_size as f64 * (1.0 - self.turnover_rate)).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::Config("population_size must be positive".into()));
        }
        if !(self.turnover_rate > 0.0 && self.turnover_rate <= 1.0) {
            return Err(Error::Config(format!(
                "turnover_rate {} outside (0, 1]",
                self.turnover_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::Config(format!(
                "mutation_probability {} outside [0, 1]",
                self.mutation_probability
            )));
        }
        let (lo, hi) = self.mutation_factor_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Config(format!(
                "mutation_factor_range ({lo}, {hi}) must be positive and non-empty"
            )));
        }
        if self.survivor_count() < 1 {
            return Err(Error::Config(
                "population_size and turnover_rate leave no survivors".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_keeps_thirty_of_a_hundred() {
        assert_eq!(GaConfig::default().survivor_count(), 30);
        assert!(GaConfig::default().validate().is_ok());
        assert_eq!(GaConfig::automated().mutation_probability, 0.3);
    }

    #[test]
    fn rejects_bad_ranges() {
        let bad = |f: fn(&mut GaConfig)| {
            let mut c = GaConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.mutation_factor_range = (2.0, 0.5)));
        assert!(bad(|c| c.mutation_factor_range = (0.0, 1.0)));
        assert!(bad(|c| c.turnover_rate = 1.0));
        assert!(bad(|c| c.turnover_rate = 0.0));
        assert!(bad(|c| c.mutation_probability = 1.5));
        assert!(bad(|c| c.population_size = 0));
    }
}
