use rand::Rng;

use super::config::GaConfig;
use super::population::{Individual, Population};
use crate::codec::Genome;
use crate::{Error, Result};

/// Roulette-wheel draw, probability `f_i / sum f_j`. Individuals with
/// fitness 0 can never be drawn. The population is left untouched, so the
/// same individual may be picked again.
pub fn select_parent<'a, R: Rng + ?Sized>(
    population: &'a Population,
    rng: &mut R,
) -> Result<&'a Individual> {
    let total: f64 = population.individuals.iter().map(|i| i.effective_fitness()).sum();
    if !(total > 0.0) {
        return Err(Error::NoSelectableParent);
    }
    let mut target = rng.random::<f64>() * total;
    let mut last = None;
    for ind in &population.individuals {
        let f = ind.effective_fitness();
        if f <= 0.0 {
            continue;
        }
        if target < f {
            return Ok(ind);
        }
        target -= f;
        last = Some(ind);
    }
    // rounding left `target` marginally past the final bucket
    last.ok_or(Error::NoSelectableParent)
}

/// Weighted average of the parents, `(W * g1 + (100 - W) * g2) / 100`, on
/// every coefficient including the fundamental.
pub fn crossover(parent1: &Genome, parent2: &Genome, weight: f64) -> Result<Genome> {
    if parent1.harmonic_count() != parent2.harmonic_count() {
        return Err(Error::invalid(format!(
            "cannot cross H = {} with H = {}",
            parent1.harmonic_count(),
            parent2.harmonic_count()
        )));
    }
    if !(0.0..=100.0).contains(&weight) {
        return Err(Error::invalid(format!("crossover weight {weight} outside [0, 100]")));
    }
    let coeffs = parent1
        .coeffs()
        .iter()
        .zip(parent2.coeffs())
        .map(|(a, b)| (a * weight + b * (100.0 - weight)) / 100.0)
        .collect();
    Genome::from_coeffs(parent1.harmonic_count(), coeffs)
}

/// Independently rescales each gene `m >= 1` with probability
/// `mutation_probability`. The pair `(a_m, a_-m)` is multiplied by a common
/// factor whose magnitude is uniform over `mutation_factor_range` and whose
/// sign is flipped with probability 1/2 when enabled. The fundamental is
/// never touched.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, config: &GaConfig, rng: &mut R) -> Genome {
    let mut out = genome.clone();
    mutate_in_place(&mut out, config, rng);
    out
}

/// Returns whether any gene changed.
pub(crate) fn mutate_in_place<R: Rng + ?Sized>(
    genome: &mut Genome,
    config: &GaConfig,
    rng: &mut R,
) -> bool {
    let (lo, hi) = config.mutation_factor_range;
    let mut touched = false;
    for m in 1..=genome.harmonic_count() as i64 {
        if rng.random::<f64>() >= config.mutation_probability {
            continue;
        }
        let mut factor = lo + (hi - lo) * rng.random::<f64>();
        if config.mutation_sign_flip && rng.random_bool(0.5) {
            factor = -factor;
        }
        let (plus, minus) = (genome.coeff(m), genome.coeff(-m));
        // m is within range by construction
        genome.set_coeff(m, plus * factor).expect("harmonic in range");
        genome.set_coeff(-m, minus * factor).expect("harmonic in range");
        touched |= factor != 1.0;
    }
    touched
}

/// Reduces the population to `survivor_count`.
///
/// Fitness-0 individuals go first. If more must die, victims are drawn one
/// at a time with probability `(7 - f_i) / sum (7 - f_j)` over those still
/// alive. If removing every fitness-0 individual would leave too few, a
/// uniformly random subset of them is spared instead. Survivors keep their
/// order and grades.
pub fn kill<R: Rng + ?Sized>(
    population: &Population,
    survivor_count: usize,
    rng: &mut R,
) -> Result<Population> {
    let n = population.len();
    if survivor_count > n {
        return Err(Error::invalid(format!(
            "cannot keep {survivor_count} survivors out of {n}"
        )));
    }
    let fitness: Vec<f64> = population
        .individuals
        .iter()
        .map(|i| i.effective_fitness())
        .collect();
    let mut alive = vec![true; n];
    let zeros: Vec<usize> = (0..n).filter(|&i| fitness[i] <= 0.0).collect();
    let positive = n - zeros.len();

    if positive >= survivor_count {
        for &i in &zeros {
            alive[i] = false;
        }
        let mut remaining: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        while remaining.len() > survivor_count {
            let total: f64 = remaining.iter().map(|&i| 7.0 - fitness[i]).sum();
            let mut target = rng.random::<f64>() * total;
            let mut victim = remaining.len() - 1;
            for (slot, &i) in remaining.iter().enumerate() {
                let w = 7.0 - fitness[i];
                if target < w {
                    victim = slot;
                    break;
                }
                target -= w;
            }
            alive[remaining.remove(victim)] = false;
        }
    } else {
        // spare (survivor_count - positive) zeros chosen uniformly
        let mut pool = zeros;
        let kill_count = pool.len() - (survivor_count - positive);
        for k in 0..kill_count {
            let pick = rng.random_range(k..pool.len());
            pool.swap(k, pick);
            alive[pool[k]] = false;
        }
    }

    Ok(Population {
        generation_index: population.generation_index,
        individuals: population
            .individuals
            .iter()
            .zip(&alive)
            .filter(|(_, keep)| **keep)
            .map(|(ind, _)| ind.clone())
            .collect(),
        next_id: population.next_id,
    })
}
