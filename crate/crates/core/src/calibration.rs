//! Fitting the similarity index from iso-similarity judgments.
//!
//! A trial copies a base genome three times and perturbs gene `i` of the
//! first copy and gene `j` of the second. The designer then rescales gene
//! `j` until both copies look equally different from the base, and rates
//! that difference on the seven-level scale. Iso-similarity gives
//! `alpha(i) d_i = alpha(j) d_j`, from which the exponent `b` or the
//! independent weights follow; the rating fixes the overall scale `a`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codec::Genome;
use crate::similarity::{
    gene_distance, index_from_distance, level_to_percent, similarity_index, CoefficientBounds, ModelKind,
    SimilarityModel, SimilarityParams,
};
use crate::{Error, Result};

/// Base genome and two single-gene variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTrial {
    pub base: Genome,
    pub variant1: Genome,
    pub variant2: Genome,
    pub gene_i: usize,
    pub gene_j: usize,
}

impl CalibrationTrial {
    /// Checks that `variant1` differs from `base` only at gene `i` and
    /// `variant2` only at gene `j`.
    pub fn new(base: Genome, variant1: Genome, variant2: Genome, gene_i: usize, gene_j: usize) -> Result<Self> {
        if gene_i == gene_j {
            return Err(Error::invalid(format!("trial genes must differ, both are {gene_i}")));
        }
        let h = base.harmonic_count();
        for g in [gene_i, gene_j] {
            if g < 1 || g > h {
                return Err(Error::invalid(format!("gene {g} outside 1..={h}")));
            }
        }
        for (variant, gene, name) in [(&variant1, gene_i, "variant1"), (&variant2, gene_j, "variant2")] {
            if variant.harmonic_count() != h {
                return Err(Error::invalid(format!("{name} has a different harmonic count")));
            }
            let stray = base
                .iter()
                .zip(variant.iter())
                .find(|((m, a), (_, b))| m.unsigned_abs() as usize != gene && a != b);
            if let Some(((m, _), _)) = stray {
                return Err(Error::invalid(format!("{name} differs from the base at harmonic {m}")));
            }
        }
        Ok(CalibrationTrial {
            base,
            variant1,
            variant2,
            gene_i,
            gene_j,
        })
    }

    /// Replaces the second variant by the base with gene `j` scaled by `factor`.
    pub fn with_variant2_factor(&self, factor: f64) -> Result<Self> {
        let variant2 = scale_gene(&self.base, self.gene_j, factor)?;
        CalibrationTrial::new(self.base.clone(), self.variant1.clone(), variant2, self.gene_i, self.gene_j)
    }

    /// `(d_i, d_j)`: gene distances of each variant from the base.
    pub fn distances(&self, bounds: &CoefficientBounds) -> Result<(f64, f64)> {
        Ok((
            gene_distance(self.base.gene(self.gene_i), self.variant1.gene(self.gene_i), self.gene_i, bounds)?,
            gene_distance(self.base.gene(self.gene_j), self.variant2.gene(self.gene_j), self.gene_j, bounds)?,
        ))
    }
}

fn scale_gene(genome: &Genome, m: usize, factor: f64) -> Result<Genome> {
    let mut out = genome.clone();
    let mut gene = out.gene(m);
    gene.plus *= factor;
    gene.minus *= factor;
    out.set_gene(m, gene)?;
    Ok(out)
}

/// Builds a trial whose variants rescale genes `i` and `j` of `base` by
/// `1 +- s * U(0.5, 1)` with `s = perturbation_scale` and a random sign.
pub fn make_trial<R: Rng + ?Sized>(
    base: &Genome,
    gene_i: usize,
    gene_j: usize,
    perturbation_scale: f64,
    rng: &mut R,
) -> Result<CalibrationTrial> {
    if gene_i == gene_j {
        return Err(Error::invalid(format!("trial genes must differ, both are {gene_i}")));
    }
    if !(perturbation_scale >= 0.0 && perturbation_scale.is_finite()) {
        return Err(Error::invalid("perturbation scale must be non-negative"));
    }
    let mut factor = || {
        let magnitude = perturbation_scale * (0.5 + 0.5 * rng.random::<f64>());
        if rng.random_bool(0.5) {
            1.0 + magnitude
        } else {
            1.0 - magnitude
        }
    };
    let (fi, fj) = (factor(), factor());
    CalibrationTrial::new(
        base.clone(),
        scale_gene(base, gene_i, fi)?,
        scale_gene(base, gene_j, fj)?,
        gene_i,
        gene_j,
    )
}

/// A finalized trial as judged by the designer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationJudgment {
    pub trial: CalibrationTrial,
    pub iso_similar: bool,
    pub similarity_level: u8,
}

impl CalibrationJudgment {
    pub fn record(&self, trial_id: impl Into<String>, bounds: &CoefficientBounds) -> Result<JudgmentRecord> {
        level_to_percent(self.similarity_level)?;
        let (dist_i, dist_j) = self.trial.distances(bounds)?;
        Ok(JudgmentRecord {
            trial_id: trial_id.into(),
            gene_i: self.trial.gene_i,
            gene_j: self.trial.gene_j,
            dist_i,
            dist_j,
            iso_similar: self.iso_similar,
            similarity_level: self.similarity_level,
        })
    }
}

/// One line of the judgment log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub trial_id: String,
    pub gene_i: usize,
    pub gene_j: usize,
    pub dist_i: f64,
    pub dist_j: f64,
    pub iso_similar: bool,
    pub similarity_level: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std_dev: f64,
}

impl Estimate {
    fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_dev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Estimate { values, mean, std_dev }
    }
}

fn require_iso(records: &[JudgmentRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("no judgments"));
    }
    if let Some(r) = records.iter().find(|r| !r.iso_similar) {
        return Err(Error::invalid(format!("judgment {} is not iso-similar", r.trial_id)));
    }
    for r in records {
        if r.gene_i == r.gene_j {
            return Err(Error::invalid(format!("judgment {} uses the same gene twice", r.trial_id)));
        }
        if !(r.dist_i > 0.0 && r.dist_j > 0.0) || !r.dist_i.is_finite() || !r.dist_j.is_finite() {
            return Err(Error::DegenerateTrial(format!(
                "judgment {} has a zero gene distance",
                r.trial_id
            )));
        }
    }
    Ok(())
}

/// Exponent of the exponential model: per judgment
/// `b = ln(d_i / d_j) / (j - i)`, then averaged.
pub fn estimate_b(records: &[JudgmentRecord]) -> Result<Estimate> {
    require_iso(records)?;
    let values = records
        .iter()
        .map(|r| (r.dist_i / r.dist_j).ln() / (r.gene_j as f64 - r.gene_i as f64))
        .collect();
    Ok(Estimate::from_values(values))
}

/// Scale of the exponential model given `b`: per judgment
/// `a = (100 / x - 1) / sum_m e^{b m} ||g0_m - g1_m||^2`, where only gene
/// `i` of the first variant differs from the base.
pub fn estimate_a(records: &[JudgmentRecord], b: f64, gene_span: usize) -> Result<Estimate> {
    if records.is_empty() {
        return Err(Error::invalid("no judgments"));
    }
    let values = records
        .iter()
        .map(|r| {
            if r.gene_i < 1 || r.gene_i > gene_span {
                return Err(Error::invalid(format!("gene {} outside the span 1..={gene_span}", r.gene_i)));
            }
            let percent = level_to_percent(r.similarity_level)?;
            let denominator = (b * r.gene_i as f64).exp() * r.dist_i;
            if !(denominator > 0.0) || !denominator.is_finite() {
                return Err(Error::DegenerateTrial(format!("judgment {} has no weighted change", r.trial_id)));
            }
            Ok((100.0 / percent - 1.0) / denominator)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_values(values))
}

/// Independent weights `p_1..=p_span` from iso-similarity ratios.
///
/// Every judgment contributes `ln p_i - ln p_j = ln(d_j / d_i)`; the
/// overdetermined system is solved in the least-squares sense with
/// `p_1 = 1`. Judgments must link all genes of the span into one connected
/// graph.
pub fn fit_weights(records: &[JudgmentRecord], gene_span: usize) -> Result<Vec<f64>> {
    require_iso(records)?;
    if gene_span < 1 {
        return Err(Error::invalid("gene span must be positive"));
    }
    let mut parent: Vec<usize> = (0..gene_span).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in records {
        for g in [r.gene_i, r.gene_j] {
            if g < 1 || g > gene_span {
                return Err(Error::invalid(format!("gene {g} outside the span 1..={gene_span}")));
            }
        }
        let (a, b) = (root(&mut parent, r.gene_i - 1), root(&mut parent, r.gene_j - 1));
        parent[a] = b;
    }
    let first = root(&mut parent, 0);
    if let Some(gene) = (1..gene_span).find(|&g| root(&mut parent, g) != first) {
        return Err(Error::UnderdeterminedFit(format!(
            "gene {} is not linked to gene 1 by any chain of judgments",
            gene + 1
        )));
    }
    if gene_span == 1 {
        return Ok(vec![1.0]);
    }

    // unknowns: ln p_2 ..= ln p_span
    let unknowns = gene_span - 1;
    let mut design = DMatrix::<f64>::zeros(records.len(), unknowns);
    let mut rhs = DVector::<f64>::zeros(records.len());
    for (row, r) in records.iter().enumerate() {
        if r.gene_i > 1 {
            design[(row, r.gene_i - 2)] += 1.0;
        }
        if r.gene_j > 1 {
            design[(row, r.gene_j - 2)] -= 1.0;
        }
        rhs[row] = (r.dist_j / r.dist_i).ln();
    }
    let solution = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::UnderdeterminedFit(e.to_string()))?;
    let mut weights = vec![1.0];
    weights.extend(solution.iter().map(|x| x.exp()));
    Ok(weights)
}

/// Exponential parameters from judgments: mean `b`, then mean `a`.
pub fn fit_exponential(
    records: &[JudgmentRecord],
    bounds: &CoefficientBounds,
    gene_span: usize,
) -> Result<(SimilarityParams, Estimate, Estimate)> {
    let b = estimate_b(records)?;
    let a = estimate_a(records, b.mean, gene_span)?;
    if !(a.mean > 0.0) {
        return Err(Error::DegenerateTrial(
            "every judgment rated the variants identical; a cannot be fitted".into(),
        ));
    }
    let params = SimilarityParams::new(
        SimilarityModel::Exponential { a: a.mean, b: b.mean },
        bounds.clone(),
        gene_span,
    )?;
    Ok((params, b, a))
}

/// Weighted parameters from judgments. The gauge `p_1 = 1` is replaced by
/// an overall scale refitted from the similarity levels, the same way `a`
/// is for the exponential form.
pub fn fit_weighted(
    records: &[JudgmentRecord],
    bounds: &CoefficientBounds,
    gene_span: usize,
) -> Result<(SimilarityParams, Vec<f64>, Estimate)> {
    let weights = fit_weights(records, gene_span)?;
    let scales = records
        .iter()
        .map(|r| {
            let percent = level_to_percent(r.similarity_level)?;
            Ok((100.0 / percent - 1.0) / (weights[r.gene_i - 1] * r.dist_i))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = Estimate::from_values(scales);
    if !(scale.mean > 0.0) {
        return Err(Error::DegenerateTrial(
            "every judgment rated the variants identical; the scale cannot be fitted".into(),
        ));
    }
    let scaled = weights.iter().map(|w| w * scale.mean).collect();
    let params = SimilarityParams::new(SimilarityModel::Weighted { weights: scaled }, bounds.clone(), gene_span)?;
    Ok((params, weights, scale))
}

/// Holdout error of one model on the 0-100 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub model: ModelKind,
    pub predicted: Vec<f64>,
    /// `predicted - observed` per holdout pair.
    pub residuals: Vec<f64>,
    pub rmse: f64,
    pub mae: f64,
}

impl ModelScore {
    pub fn from_predictions(model: ModelKind, predicted: Vec<f64>, observed: &[f64]) -> Result<Self> {
        if predicted.is_empty() || predicted.len() != observed.len() {
            return Err(Error::invalid("holdout must be non-empty and matched"));
        }
        let residuals: Vec<f64> = predicted.iter().zip(observed).map(|(p, o)| p - o).collect();
        let n = residuals.len() as f64;
        let rmse = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
        let mae = residuals.iter().map(|r| r.abs()).sum::<f64>() / n;
        Ok(ModelScore {
            model,
            predicted,
            residuals,
            rmse,
            mae,
        })
    }
}

/// A holdout pair and the designer's similarity level for it.
pub type HoldoutPair = (Genome, Genome, u8);

/// Scores both fitted models against rated holdout pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub exponential: ModelScore,
    pub weighted: ModelScore,
    /// Model with the lower RMSE (exponential on ties).
    pub selected: ModelKind,
}

pub fn compare_models(
    exp_params: &SimilarityParams,
    weight_params: &SimilarityParams,
    holdout: &[HoldoutPair],
) -> Result<Comparison> {
    if holdout.is_empty() {
        return Err(Error::invalid("holdout is empty"));
    }
    let observed = holdout
        .iter()
        .map(|(_, _, level)| level_to_percent(*level))
        .collect::<Result<Vec<_>>>()?;
    let predict = |params: &SimilarityParams| {
        holdout
            .iter()
            .map(|(k, l, _)| similarity_index(k, l, params))
            .collect::<Result<Vec<_>>>()
    };
    let exponential = ModelScore::from_predictions(ModelKind::Exponential, predict(exp_params)?, &observed)?;
    let weighted = ModelScore::from_predictions(ModelKind::Weighted, predict(weight_params)?, &observed)?;
    let selected = if weighted.rmse < exponential.rmse {
        ModelKind::Weighted
    } else {
        ModelKind::Exponential
    };
    Ok(Comparison {
        exponential,
        weighted,
        selected,
    })
}

/// Outcome of a calibration run, emitted as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: SimilarityParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Estimate>,
    /// Gauge-fixed weights (`p_1 = 1`) before the scale refit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

/// Fits the requested model; with a holdout, both models are fitted and
/// scored and the report carries the comparison.
pub fn calibrate(
    records: &[JudgmentRecord],
    bounds: &CoefficientBounds,
    gene_span: usize,
    model: ModelKind,
    holdout: &[HoldoutPair],
) -> Result<FitReport> {
    let mut report = match model {
        ModelKind::Exponential => {
            let (params, b, a) = fit_exponential(records, bounds, gene_span)?;
            FitReport {
                params,
                b: Some(b),
                a: Some(a),
                weights: None,
                comparison: None,
            }
        }
        ModelKind::Weighted => {
            let (params, weights, _) = fit_weighted(records, bounds, gene_span)?;
            FitReport {
                params,
                b: None,
                a: None,
                weights: Some(weights),
                comparison: None,
            }
        }
    };
    if !holdout.is_empty() {
        let (exp_params, _, _) = fit_exponential(records, bounds, gene_span)?;
        let (weight_params, _, _) = fit_weighted(records, bounds, gene_span)?;
        report.comparison = Some(compare_models(&exp_params, &weight_params, holdout)?);
    }
    Ok(report)
}

/// Similarity predicted by `params` for a judgment's first variant; handy
/// for checking a fitted model against the levels it was fitted on.
pub fn predicted_percent(record: &JudgmentRecord, params: &SimilarityParams) -> f64 {
    index_from_distance(params.model().alpha(record.gene_i) * record.dist_i)
}
