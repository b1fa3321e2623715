//! Population lifecycle of the interactive genetic algorithm.
//!
//! Fitness is supplied from outside (a designer grading shapes, or an
//! automated oracle). One call to [`evolve`] turns a graded generation into
//! the next one: survivors picked by inverse-roulette killing plus children
//! bred by roulette selection, weighted-average crossover and mutation.

mod config;
mod operators;
mod population;

use rand::Rng;

pub use config::GaConfig;
pub use operators::{crossover, kill, mutate, select_parent};
pub use population::{Individual, IndividualId, Population, MAX_FITNESS, UNGRADED_FITNESS};

use crate::codec::normalize;
use crate::{Error, Result};

/// Produces the next generation, of exactly `config.population_size`
/// individuals.
///
/// Ungraded individuals count as [`UNGRADED_FITNESS`]. Parents are drawn
/// from the whole incoming generation; killing then reduces that same
/// generation to the survivor count (a generation already at or below it,
/// such as the founders, is kept whole) and the children fill the rest.
/// Mutated children are brought back to canonical form.
pub fn evolve<R: Rng + ?Sized>(
    population: &Population,
    config: &GaConfig,
    rng: &mut R,
) -> Result<Population> {
    config.validate()?;
    if !population.has_positive_fitness() {
        return Err(Error::NoSelectableParent);
    }
    let target = config.survivor_count();
    let child_count = config
        .population_size
        .saturating_sub(target.min(population.len()));
    let generation = population.generation_index + 1;

    let mut next_id = population.next_id;
    let mut children = Vec::with_capacity(child_count);
    for _ in 0..child_count {
        let first = select_parent(population, rng)?;
        let second = select_parent(population, rng)?;
        let weight = rng.random::<f64>() * 100.0;
        let mut genome = crossover(&first.genome, &second.genome, weight)?;
        if operators::mutate_in_place(&mut genome, config, rng) {
            // a vanishing first harmonic keeps the raw child
            if let Ok(canonical) = normalize(&genome) {
                genome = canonical;
            }
        }
        children.push(Individual {
            id: next_id,
            genome,
            fitness: None,
            generation_born: generation,
            parent_ids: vec![first.id, second.id],
        });
        next_id += 1;
    }

    let survivors = if population.len() > target {
        kill(population, target, rng)?.individuals
    } else {
        population.individuals.clone()
    };

    let mut individuals = survivors;
    individuals.extend(children);
    Ok(Population {
        generation_index: generation,
        individuals,
        next_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Genome;
    use crate::seeded_rng;
    use num_complex::Complex64;

    fn founders(n: usize) -> Population {
        let mut rng = seeded_rng(1);
        Population::founders((0..n).map(|_| {
            let mut g = Genome::zeros(3).unwrap();
            g.set_coeff(1, Complex64::new(1.0, 0.0)).unwrap();
            for m in [-3i64, -2, -1, 2, 3] {
                g.set_coeff(m, Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 0.2)
                    .unwrap();
            }
            normalize(&g).unwrap()
        }))
    }

    #[test]
    fn thirty_founders_become_a_hundred() {
        let mut pop = founders(30);
        for (i, ind) in pop.individuals.iter_mut().enumerate() {
            ind.fitness = Some((i % 7) as f64);
        }
        let next = evolve(&pop, &GaConfig::default(), &mut seeded_rng(4)).unwrap();
        assert_eq!(next.len(), 100);
        assert_eq!(next.generation_index, 1);
        assert!(next.individuals.iter().filter(|i| i.generation_born < 1).count() <= 30);
        assert!(next.individuals[30..].iter().all(|c| c.fitness.is_none() && c.parent_ids.len() == 2));
    }

    #[test]
    fn single_fit_individual_parents_everything() {
        let mut pop = founders(10);
        for ind in pop.individuals.iter_mut() {
            ind.fitness = Some(0.0);
        }
        pop.individuals[4].fitness = Some(6.0);
        let config = GaConfig {
            mutation_probability: 0.0,
            ..GaConfig::default()
        };
        let next = evolve(&pop, &config, &mut seeded_rng(2)).unwrap();
        let source = &pop.individuals[4];
        for child in next.individuals.iter().filter(|i| i.generation_born == 1) {
            assert_eq!(child.parent_ids, vec![source.id, source.id]);
            assert!(child.genome.max_abs_diff(&source.genome) < 1e-12);
        }
    }

    #[test]
    fn all_zero_generation_cannot_evolve() {
        let mut pop = founders(5);
        for ind in pop.individuals.iter_mut() {
            ind.fitness = Some(0.0);
        }
        assert_eq!(
            evolve(&pop, &GaConfig::default(), &mut seeded_rng(0)).unwrap_err(),
            Error::NoSelectableParent
        );
    }

    #[test]
    fn same_seed_same_successor() {
        let pop = founders(30);
        let config = GaConfig::automated();
        let a = evolve(&pop, &config, &mut seeded_rng(8)).unwrap();
        let b = evolve(&pop, &config, &mut seeded_rng(8)).unwrap();
        assert_eq!(a, b);
    }
}
