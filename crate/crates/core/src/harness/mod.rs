//! Automated experiments on top of the engine and the similarity index.
//!
//! The target-convergence run lets a similarity oracle play the designer:
//! every individual is graded by its resemblance to a withheld target, and
//! the run records how fast the population closes in on it.

mod compare;
mod doe;

use serde::{Deserialize, Serialize};

pub use compare::{PairwiseComparison, Verdict};
pub use doe::{doe_sweep, DoeGrid, DOE_REFERENCE_POINTS};

use crate::codec::{normalize, Genome};
use crate::engine::{evolve, GaConfig, Individual, IndividualId, Population, MAX_FITNESS};
use crate::similarity::{index_from_distance, SimilarityParams};
use crate::{seeded_rng, Error, Result};

/// Continuous fitness in `[0, 6]`: `6 * SimInd(candidate, target) / 100`.
pub fn sim_fitness(candidate: &Genome, target: &Genome, params: &SimilarityParams) -> Result<f64> {
    let d = params.canonical_distance(&normalize(candidate)?, &normalize(target)?)?;
    Ok(percent_to_fitness(index_from_distance(d)))
}

fn percent_to_fitness(percent: f64) -> f64 {
    MAX_FITNESS * percent / 100.0
}

/// Summary of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub average_fitness: f64,
    pub best_fitness: f64,
    pub best_id: IndividualId,
    pub average_similarity: f64,
}

/// One entry per completed generation, generation 0 first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub entries: Vec<GenerationStats>,
}

impl ConvergenceTrace {
    pub fn record(&mut self, population: &Population, params: &SimilarityParams) -> Result<&GenerationStats> {
        let best = population
            .best()
            .ok_or_else(|| Error::invalid("empty population"))?;
        let stats = GenerationStats {
            generation: population.generation_index,
            average_fitness: population.average_fitness(),
            best_fitness: best.effective_fitness(),
            best_id: best.id,
            average_similarity: average_population_similarity(population, params)?,
        };
        self.entries.push(stats);
        Ok(self.entries.last().expect("just pushed"))
    }

    /// Rows `generation,avg_fitness,best_fitness,avg_similarity` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,avg_fitness,best_fitness,avg_similarity\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.generation,
                format_sig(e.average_fitness),
                format_sig(e.best_fitness),
                format_sig(e.average_similarity)
            ));
        }
        out
    }
}

/// Fixed-point rendering with 9 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (8 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Result of an automated run toward a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRun {
    pub trace: ConvergenceTrace,
    pub best: Individual,
    /// Best similarity to the target, in percent, per generation.
    pub best_similarity: Vec<f64>,
    pub final_population: Population,
}

/// Runs the engine for `generations` generations with every individual
/// graded by [`sim_fitness`] against `target`. The random source is seeded
/// from `config.rng_seed`.
///
/// The target must not already be in `initial`: a founder whose canonical
/// form matches the target's within `1e-9` is an invalid setup.
pub fn run_target_convergence(
    target: &Genome,
    initial: &[Genome],
    config: &GaConfig,
    params: &SimilarityParams,
    generations: u32,
) -> Result<TargetRun> {
    config.validate()?;
    let target = normalize(target)?;
    for (i, g) in initial.iter().enumerate() {
        let canonical = normalize(g)?;
        if canonical.harmonic_count() == target.harmonic_count() && canonical.max_abs_diff(&target) < 1e-9 {
            return Err(Error::InvalidSetup(format!(
                "initial genome {i} is the target; it must be withheld"
            )));
        }
    }
    if initial.is_empty() {
        return Err(Error::InvalidSetup("empty initial population".into()));
    }

    let mut rng = seeded_rng(config.rng_seed);
    let mut population = Population::founders(initial.iter().cloned());
    let mut trace = ConvergenceTrace::default();
    let mut best_similarity = Vec::with_capacity(generations as usize + 1);

    let grade = |population: &mut Population| -> Result<f64> {
        let mut best = 0.0f64;
        for ind in population.individuals.iter_mut() {
            let percent = index_from_distance(params.canonical_distance(&normalize(&ind.genome)?, &target)?);
            best = best.max(percent);
            ind.fitness = Some(percent_to_fitness(percent));
        }
        Ok(best)
    };

    best_similarity.push(grade(&mut population)?);
    trace.record(&population, params)?;
    for _ in 0..generations {
        population = evolve(&population, config, &mut rng)?;
        best_similarity.push(grade(&mut population)?);
        trace.record(&population, params)?;
    }
    let best = population.best().expect("non-empty population").clone();
    Ok(TargetRun {
        trace,
        best,
        best_similarity,
        final_population: population,
    })
}

/// `matrix[i][j] = SimInd(G_i, G_j)`; exactly symmetric with a diagonal of 100.
pub fn similarity_matrix(genomes: &[Genome], params: &SimilarityParams) -> Result<Vec<Vec<f64>>> {
    if genomes.len() < 2 {
        return Err(Error::invalid("a similarity matrix needs at least 2 genomes"));
    }
    let canonical = genomes.iter().map(normalize).collect::<Result<Vec<_>>>()?;
    let n = canonical.len();
    let mut matrix = vec![vec![100.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s = index_from_distance(params.canonical_distance(&canonical[i], &canonical[j])?);
            matrix[i][j] = s;
            matrix[j][i] = s;
        }
    }
    Ok(matrix)
}

/// Mean of the off-diagonal entries of a similarity matrix.
pub fn average_off_diagonal(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    let mut sum = 0.0;
    for (i, row) in matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                sum += v;
            }
        }
    }
    sum / (n * (n - 1)) as f64
}

/// Average pairwise similarity between the individuals of a population.
pub fn average_population_similarity(population: &Population, params: &SimilarityParams) -> Result<f64> {
    if population.len() < 2 {
        return Err(Error::invalid("need at least 2 individuals"));
    }
    let genomes: Vec<Genome> = population.individuals.iter().map(|i| i.genome.clone()).collect();
    Ok(average_off_diagonal(&similarity_matrix(&genomes, params)?))
}

/// Similarity of each best individual (rows) to every initial one (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestVsInitial {
    pub table: Vec<Vec<f64>>,
    /// Column of the most similar initial individual for each row.
    pub argmax: Vec<usize>,
}

pub fn best_vs_initial(best: &[Genome], initial: &[Genome], params: &SimilarityParams) -> Result<BestVsInitial> {
    if best.is_empty() || initial.is_empty() {
        return Err(Error::invalid("both lists must be non-empty"));
    }
    let initial = initial.iter().map(normalize).collect::<Result<Vec<_>>>()?;
    let table = best
        .iter()
        .map(|b| {
            let b = normalize(b)?;
            initial
                .iter()
                .map(|g| Ok(index_from_distance(params.canonical_distance(&b, g)?)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let argmax = table
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if *v > acc.1 { (j, *v) } else { acc })
                .0
        })
        .collect();
    Ok(BestVsInitial { table, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{compute_bounds, SimilarityModel};
    use num_complex::Complex64;

    fn genome(seed: u64) -> Genome {
        use rand::Rng;
        let mut rng = seeded_rng(seed);
        let mut g = Genome::zeros(12).unwrap();
        g.set_coeff(1, Complex64::new(1.0, 0.0)).unwrap();
        g.set_coeff(-1, Complex64::new(0.4, 0.0)).unwrap();
        for m in 2..=12i64 {
            for s in [m, -m] {
                g.set_coeff(s, Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 0.1)
                    .unwrap();
            }
        }
        normalize(&g).unwrap()
    }

    fn params(genomes: &[Genome]) -> SimilarityParams {
        SimilarityParams::new(
            SimilarityModel::Exponential { a: 1.0, b: -0.2 },
            compute_bounds(genomes, 10).unwrap(),
            10,
        )
        .unwrap()
    }

    #[test]
    fn fitness_of_identical_and_half_similar() {
        let gs: Vec<Genome> = (0..5).map(genome).collect();
        let p = params(&gs);
        assert_eq!(sim_fitness(&gs[0], &gs[0], &p).unwrap(), 6.0);
        assert_eq!(percent_to_fitness(50.0), 3.0);
        assert!((percent_to_fitness(44.0) - 2.64).abs() < 1e-12);
    }

    #[test]
    fn target_in_initial_is_rejected() {
        let gs: Vec<Genome> = (0..5).map(genome).collect();
        let p = params(&gs);
        let err = run_target_convergence(&gs[2], &gs, &GaConfig::automated(), &p, 3).unwrap_err();
        assert!(matches!(err, Error::InvalidSetup(_)));
    }

    #[test]
    fn zero_generations_grades_founders_only() {
        let gs: Vec<Genome> = (0..6).map(genome).collect();
        let p = params(&gs);
        let run = run_target_convergence(&gs[0], &gs[1..], &GaConfig::automated(), &p, 0).unwrap();
        assert_eq!(run.trace.entries.len(), 1);
        assert_eq!(run.trace.entries[0].generation, 0);
        assert_eq!(run.final_population.len(), 5);
        assert!(run.final_population.individuals.iter().all(|i| i.fitness.is_some()));
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let mut gs: Vec<Genome> = (0..4).map(genome).collect();
        gs.push(gs[1].clone());
        let p = params(&gs);
        let m = similarity_matrix(&gs, &p).unwrap();
        for i in 0..gs.len() {
            assert_eq!(m[i][i], 100.0);
            for j in 0..gs.len() {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
        assert_eq!(m[1][4], 100.0);
        assert!(similarity_matrix(&gs[..1], &p).is_err());
    }

    #[test]
    fn population_similarity_of_pairs_and_clones() {
        let gs: Vec<Genome> = (0..3).map(genome).collect();
        let p = params(&gs);
        let clones = Population::founders(vec![gs[0].clone(); 4]);
        assert_eq!(average_population_similarity(&clones, &p).unwrap(), 100.0);
        let pair = Population::founders(gs[..2].to_vec());
        let direct = crate::similarity::similarity_index(&gs[0], &gs[1], &p).unwrap();
        assert!((average_population_similarity(&pair, &p).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn best_matching_initial_is_the_argmax() {
        let gs: Vec<Genome> = (0..6).map(genome).collect();
        let p = params(&gs);
        let t = best_vs_initial(&[gs[3].clone()], &gs, &p).unwrap();
        assert_eq!(t.table[0][3], 100.0);
        assert_eq!(t.argmax, vec![3]);
    }

    #[test]
    fn far_away_best_scores_near_zero() {
        let gs: Vec<Genome> = (0..6).map(genome).collect();
        let p = params(&gs);
        let mut far = gs[0].clone();
        for m in 2..=10i64 {
            far.set_coeff(m, Complex64::new(50.0, -50.0)).unwrap();
        }
        let t = best_vs_initial(&[far], &gs, &p).unwrap();
        assert!(t.table[0].iter().all(|v| *v < 0.1));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(3.0), "3.00000000");
        assert_eq!(format_sig(12.3456789012), "12.3456789");
        assert_eq!(format_sig(0.000123456789123), "0.000123456789");
        assert_eq!(format_sig(0.0), "0");
    }
}
