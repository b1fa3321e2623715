use serde::{Deserialize, Serialize};

use crate::codec::Genome;
use crate::{Error, Result};

pub type IndividualId = u64;

/// Highest grade a designer can give.
pub const MAX_FITNESS: f64 = 6.0;

/// Fitness assumed for individuals nobody graded when the generation is evolved.
pub const UNGRADED_FITNESS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: IndividualId,
    pub genome: Genome,
    /// `None` until graded; always within `[0, 6]` when set.
    pub fitness: Option<f64>,
    pub generation_born: u32,
    /// Empty for founders, two ids for children.
    pub parent_ids: Vec<IndividualId>,
}

impl Individual {
    pub fn founder(id: IndividualId, genome: Genome) -> Self {
        Individual {
            id,
            genome,
            fitness: None,
            generation_born: 0,
            parent_ids: Vec::new(),
        }
    }

    /// Fitness used by selection and killing.
    pub fn effective_fitness(&self) -> f64 {
        self.fitness.unwrap_or(UNGRADED_FITNESS)
    }
}

pub(crate) fn check_fitness(fitness: f64) -> Result<()> {
    if (0.0..=MAX_FITNESS).contains(&fitness) {
        Ok(())
    } else {
        Err(Error::invalid(format!("fitness {fitness} outside [0, 6]")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub generation_index: u32,
    pub individuals: Vec<Individual>,
    /// Next unused individual id; ids are never reused within a lineage.
    pub next_id: IndividualId,
}

impl Population {
    /// Generation 0, ungraded, ids `0..n`.
    pub fn founders(genomes: impl IntoIterator<Item = Genome>) -> Self {
        let individuals: Vec<Individual> = genomes
            .into_iter()
            .enumerate()
            .map(|(i, g)| Individual::founder(i as IndividualId, g))
            .collect();
        Population {
            generation_index: 0,
            next_id: individuals.len() as IndividualId,
            individuals,
        }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn get(&self, id: IndividualId) -> Option<&Individual> {
        self.individuals.iter().find(|i| i.id == id)
    }

    pub fn grade(&mut self, id: IndividualId, fitness: f64) -> Result<()> {
        check_fitness(fitness)?;
        let ind = self
            .individuals
            .iter_mut()
            .find(|i| i.id == id)
            .ok_or_else(|| Error::invalid(format!("no individual {id} in generation")))?;
        ind.fitness = Some(fitness);
        Ok(())
    }

    pub fn has_positive_fitness(&self) -> bool {
        self.individuals.iter().any(|i| i.effective_fitness() > 0.0)
    }

    pub fn average_fitness(&self) -> f64 {
        if self.individuals.is_empty() {
            return 0.0;
        }
        self.individuals.iter().map(|i| i.effective_fitness()).sum::<f64>() / self.len() as f64
    }

    /// Fittest individual; ties go to the earliest in the list.
    pub fn best(&self) -> Option<&Individual> {
        self.individuals.iter().fold(None, |best: Option<&Individual>, ind| match best {
            Some(b) if b.effective_fitness() >= ind.effective_fitness() => Some(b),
            _ => Some(ind),
        })
    }
}
