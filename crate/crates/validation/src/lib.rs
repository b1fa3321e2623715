//! Independent oracles for validating the core library.
//!
//! Everything here builds inputs whose correct answer is known by
//! construction: random genomes in canonical-friendly form, calibration
//! judgments generated exactly (or with controlled noise) from a ground-truth
//! similarity model, and rated holdout pairs.

use fourier_iga_core::calibration::{CalibrationJudgment, CalibrationTrial, HoldoutPair, JudgmentRecord};
use fourier_iga_core::similarity::{gene_distance, index_from_distance, CoefficientBounds, LEVEL_PERCENT};
use fourier_iga_core::{Genome, Result, SimilarityModel};
use num_complex::Complex64;
use rand::Rng;

/// Genome with `harmonic_count` harmonics, `a_1 = e^{i phi}` and every other
/// coefficient of order `1..=max_gene` drawn with magnitude up to
/// `max_magnitude` and a uniform phase. Higher orders and `a_0` are zero.
pub fn random_genome<R: Rng + ?Sized>(
    harmonic_count: usize,
    max_gene: usize,
    max_magnitude: f64,
    rng: &mut R,
) -> Genome {
    let mut g = Genome::zeros(harmonic_count).expect("positive harmonic count");
    let polar = |r: f64, rng: &mut R| Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
    let max_gene = max_gene.min(harmonic_count) as i64;
    for m in -max_gene..=max_gene {
        let c = match m {
            0 => continue,
            1 => polar(1.0, rng),
            _ => polar(max_magnitude * rng.random::<f64>(), rng),
        };
        g.set_coeff(m, c).expect("order within range");
    }
    g
}

/// `genome` with gene `m` multiplied by `factor`.
pub fn scale_gene(genome: &Genome, m: usize, factor: f64) -> Genome {
    let mut out = genome.clone();
    let mut gene = out.gene(m);
    gene.plus *= factor;
    gene.minus *= factor;
    out.set_gene(m, gene).expect("gene within range");
    out
}

/// Distance `d_m` between a gene and twice itself. Scaling gene `m` by `f`
/// moves it by `(f - 1)^2` times this.
pub fn unit_distance(base: &Genome, m: usize, bounds: &CoefficientBounds) -> Result<f64> {
    gene_distance(base.gene(m), scale_gene(base, m, 2.0).gene(m), m, bounds)
}

/// Factor `f > 1` that puts gene `m` of `base` at distance `d` from the base.
pub fn factor_for_distance(base: &Genome, m: usize, d: f64, bounds: &CoefficientBounds) -> Result<f64> {
    Ok(1.0 + (d / unit_distance(base, m, bounds)?).sqrt())
}

/// Level of the seven-step scale whose percentage is nearest to `percent`.
pub fn nearest_level(percent: f64) -> u8 {
    LEVEL_PERCENT
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - percent).abs().total_cmp(&(*b - percent).abs()))
        .map(|(i, _)| i as u8)
        .expect("non-empty scale")
}

/// Ground-truth designer: rates with `model` and answers iso-similarity
/// exactly (or up to multiplicative noise on the second distance).
pub struct SyntheticJudge<'a> {
    pub model: SimilarityModel,
    pub bounds: &'a CoefficientBounds,
}

impl SyntheticJudge<'_> {
    /// True similarity of a single-gene change of distance `d` at gene `m`.
    pub fn single_gene_percent(&self, m: usize, d: f64) -> f64 {
        index_from_distance(self.model.alpha(m) * d)
    }

    /// Iso-similar judgment on genes `(i, j)` of `base`: variant1 scales gene
    /// `i` by `factor_i`; variant2 scales gene `j` so that
    /// `alpha(i) d_i = alpha(j) d_j * noise`. The level is the truth for
    /// variant1, quantized to the nearest scale step.
    pub fn judge(
        &self,
        base: &Genome,
        gene_i: usize,
        gene_j: usize,
        factor_i: f64,
        noise: f64,
    ) -> Result<CalibrationJudgment> {
        let variant1 = scale_gene(base, gene_i, factor_i);
        let d_i = gene_distance(base.gene(gene_i), variant1.gene(gene_i), gene_i, self.bounds)?;
        let d_j = self.model.alpha(gene_i) * d_i / self.model.alpha(gene_j) * noise;
        let factor_j = factor_for_distance(base, gene_j, d_j, self.bounds)?;
        let trial = CalibrationTrial::new(
            base.clone(),
            variant1,
            scale_gene(base, gene_j, factor_j),
            gene_i,
            gene_j,
        )?;
        Ok(CalibrationJudgment {
            trial,
            iso_similar: true,
            similarity_level: nearest_level(self.single_gene_percent(gene_i, d_i)),
        })
    }

    pub fn record(&self, id: usize, judgment: &CalibrationJudgment) -> Result<JudgmentRecord> {
        judgment.record(format!("t{id}"), self.bounds)
    }

    /// Holdout pair: `base` against a copy with every gene in `genes` scaled
    /// by its factor, rated by the truth and quantized.
    pub fn holdout_pair(&self, base: &Genome, changes: &[(usize, f64)]) -> Result<HoldoutPair> {
        let mut other = base.clone();
        let mut distance = 0.0;
        for &(m, f) in changes {
            other = scale_gene(&other, m, f);
            distance += self.model.alpha(m) * gene_distance(base.gene(m), other.gene(m), m, self.bounds)?;
        }
        Ok((base.clone(), other, nearest_level(index_from_distance(distance))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fourier_iga_core::seeded_rng;
    use fourier_iga_core::similarity::compute_bounds;

    #[test]
    fn nearest_level_picks_the_closest_step() {
        assert_eq!(nearest_level(100.0), 6);
        assert_eq!(nearest_level(84.9), 4);
        assert_eq!(nearest_level(85.1), 5);
        assert_eq!(nearest_level(1.0), 0);
        assert_eq!(nearest_level(40.1), 2);
    }

    #[test]
    fn factor_hits_the_requested_distance() {
        let mut rng = seeded_rng(3);
        let genomes: Vec<Genome> = (0..5).map(|_| random_genome(12, 10, 0.2, &mut rng)).collect();
        let bounds = compute_bounds(&genomes, 10).unwrap();
        let f = factor_for_distance(&genomes[0], 4, 0.37, &bounds).unwrap();
        let moved = scale_gene(&genomes[0], 4, f);
        let d = gene_distance(genomes[0].gene(4), moved.gene(4), 4, &bounds).unwrap();
        assert!((d - 0.37).abs() < 1e-12);
    }

    #[test]
    fn random_genome_shape() {
        let g = random_genome(70, 10, 0.2, &mut seeded_rng(1));
        assert!((g.coeff(1).norm() - 1.0).abs() < 1e-15);
        assert_eq!(g.coeff(0), Complex64::new(0.0, 0.0));
        assert!(g.iter().filter(|(m, _)| m.abs() > 10).all(|(_, c)| c.norm() == 0.0));
        assert!(g.iter().filter(|(m, _)| *m != 1).all(|(_, c)| c.norm() <= 0.2));
    }
}
