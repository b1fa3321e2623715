//! Perceived-similarity index between two genomes.
//!
//! Each gene contributes a squared difference of its four real components
//! (`u_m`, `u_-m`, `v_m`, `v_-m`), each scaled by the spread of that
//! component over a reference population. Gene distances are weighted by
//! `alpha(m)`, summed over genes `1..=gene_span` into `D`, and mapped to a
//! percentage `100 / (1 + D)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codec::{normalize, Gene, Genome};
use crate::{Error, Result};

pub const DEFAULT_GENE_SPAN: usize = 10;

/// Uncalibrated exponential weighting used until a fit is available.
/// Chosen so the bundled corpus has an average pairwise index near 9%.
pub const DEFAULT_A: f64 = 100.0;
pub const DEFAULT_B: f64 = -1.0;

/// Spreads below this are treated as constant and given width 1.
const MIN_WIDTH: f64 = 1e-12;

/// Percentages of the seven-level similarity scale, indexed by level.
pub const LEVEL_PERCENT: [f64; 7] = [5.0, 30.0, 50.0, 65.0, 80.0, 90.0, 100.0];

/// Per-coefficient `(u_min, u_max, v_min, v_max)` for `m = -span..=span`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientBounds {
    entries: BTreeMap<i64, [f64; 4]>,
}

impl CoefficientBounds {
    /// Builds bounds from explicit entries; every width must be positive.
    pub fn from_entries(entries: BTreeMap<i64, [f64; 4]>) -> Result<Self> {
        for (m, [u0, u1, v0, v1]) in &entries {
            if !(u1 > u0 && v1 > v0) {
                return Err(Error::invalid(format!("bounds for m = {m} have a non-positive width")));
            }
        }
        Ok(CoefficientBounds { entries })
    }

    /// Largest `span` such that every `m` in `-span..=span` is covered.
    pub fn span(&self) -> usize {
        let mut span = 0;
        while self.entries.contains_key(&(span as i64 + 1)) && self.entries.contains_key(&(-(span as i64) - 1)) {
            span += 1;
        }
        span
    }

    pub fn get(&self, m: i64) -> Option<[f64; 4]> {
        self.entries.get(&m).copied()
    }

    pub fn entries(&self) -> &BTreeMap<i64, [f64; 4]> {
        &self.entries
    }

    fn widths(&self, m: i64) -> Result<(f64, f64)> {
        let [u0, u1, v0, v1] = self
            .get(m)
            .ok_or_else(|| Error::invalid(format!("no bounds for coefficient {m}")))?;
        Ok((u1 - u0, v1 - v0))
    }
}

/// Min/max scan of every coefficient `|m| <= gene_span` over `reference`.
///
/// The genomes are used as given; callers pass canonical genomes. A spread
/// narrower than `1e-12` is widened to exactly 1 above its minimum.
pub fn compute_bounds(reference: &[Genome], gene_span: usize) -> Result<CoefficientBounds> {
    if reference.len() < 2 {
        return Err(Error::invalid(format!(
            "bounds need at least 2 reference genomes, got {}",
            reference.len()
        )));
    }
    let span = gene_span as i64;
    let mut entries = BTreeMap::new();
    for m in -span..=span {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for g in reference {
            let c = g.coeff(m);
            b[0] = b[0].min(c.re);
            b[1] = b[1].max(c.re);
            b[2] = b[2].min(c.im);
            b[3] = b[3].max(c.im);
        }
        if b[1] - b[0] < MIN_WIDTH {
            b[1] = b[0] + 1.0;
        }
        if b[3] - b[2] < MIN_WIDTH {
            b[3] = b[2] + 1.0;
        }
        entries.insert(m, b);
    }
    Ok(CoefficientBounds { entries })
}

/// Normalized squared difference between two genes of order `m >= 1`.
pub fn gene_distance(k: Gene, l: Gene, m: usize, bounds: &CoefficientBounds) -> Result<f64> {
    let m = m as i64;
    let (wu_p, wv_p) = bounds.widths(m)?;
    let (wu_m, wv_m) = bounds.widths(-m)?;
    let sq = |d: f64, w: f64| (d / w) * (d / w);
    Ok(sq(k.plus.re - l.plus.re, wu_p)
        + sq(k.minus.re - l.minus.re, wu_m)
        + sq(k.plus.im - l.plus.im, wv_p)
        + sq(k.minus.im - l.minus.im, wv_m))
}

/// Weighting of gene `m` in the genome distance.
#[derive(Debug, Clone, PartialEq)]
pub enum SimilarityModel {
    /// `alpha(m) = a * exp(b * m)`
    Exponential { a: f64, b: f64 },
    /// `alpha(m) = weights[m - 1]`
    Weighted { weights: Vec<f64> },
}

impl SimilarityModel {
    pub fn alpha(&self, m: usize) -> f64 {
        match self {
            SimilarityModel::Exponential { a, b } => a * (b * m as f64).exp(),
            SimilarityModel::Weighted { weights } => weights[m - 1],
        }
    }
}

/// Everything needed to evaluate the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsFile", into = "ParamsFile")]
pub struct SimilarityParams {
    model: SimilarityModel,
    bounds: CoefficientBounds,
    gene_span: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[serde(alias = "exp")]
    Exponential,
    Weighted,
}

/// Wire form of [`SimilarityParams`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub gene_span: usize,
    pub bounds: CoefficientBounds,
}

impl TryFrom<ParamsFile> for SimilarityParams {
    type Error = Error;

    fn try_from(f: ParamsFile) -> Result<Self> {
        let model = match f.model {
            ModelKind::Exponential => SimilarityModel::Exponential {
                a: f.a.ok_or_else(|| Error::invalid("exponential model needs `a`"))?,
                b: f.b.ok_or_else(|| Error::invalid("exponential model needs `b`"))?,
            },
            ModelKind::Weighted => SimilarityModel::Weighted {
                weights: f
                    .weights
                    .ok_or_else(|| Error::invalid("weighted model needs `weights`"))?,
            },
        };
        SimilarityParams::new(model, CoefficientBounds::from_entries(f.bounds.entries)?, f.gene_span)
    }
}

impl From<SimilarityParams> for ParamsFile {
    fn from(p: SimilarityParams) -> Self {
        let (model, a, b, weights) = match p.model {
            SimilarityModel::Exponential { a, b } => (ModelKind::Exponential, Some(a), Some(b), None),
            SimilarityModel::Weighted { weights } => (ModelKind::Weighted, None, None, Some(weights)),
        };
        ParamsFile {
            model,
            a,
            b,
            weights,
            gene_span: p.gene_span,
            bounds: p.bounds,
        }
    }
}

impl SimilarityParams {
    pub fn new(model: SimilarityModel, bounds: CoefficientBounds, gene_span: usize) -> Result<Self> {
        if gene_span < 1 {
            return Err(Error::invalid("gene_span must be at least 1"));
        }
        match &model {
            SimilarityModel::Exponential { a, b } => {
                if !(*a > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(Error::invalid(format!("exponential model needs a > 0 and finite b, got a = {a}, b = {b}")));
                }
            }
            SimilarityModel::Weighted { weights } => {
                if weights.len() != gene_span {
                    return Err(Error::invalid(format!(
                        "{} weights for a gene span of {gene_span}",
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                    return Err(Error::invalid("weights must be positive"));
                }
            }
        }
        if bounds.span() < gene_span {
            return Err(Error::invalid(format!(
                "bounds cover genes up to {}, gene_span is {gene_span}",
                bounds.span()
            )));
        }
        Ok(SimilarityParams {
            model,
            bounds,
            gene_span,
        })
    }

    pub fn exponential(a: f64, b: f64, bounds: CoefficientBounds) -> Result<Self> {
        let span = bounds.span().min(DEFAULT_GENE_SPAN);
        SimilarityParams::new(SimilarityModel::Exponential { a, b }, bounds, span)
    }

    /// Default exponential model with bounds from the canonical forms of
    /// `reference`.
    pub fn default_for(reference: &[Genome]) -> Result<Self> {
        let canonical = reference.iter().map(normalize).collect::<Result<Vec<_>>>()?;
        Self::exponential(DEFAULT_A, DEFAULT_B, compute_bounds(&canonical, DEFAULT_GENE_SPAN)?)
    }

    pub fn model(&self) -> &SimilarityModel {
        &self.model
    }

    pub fn bounds(&self) -> &CoefficientBounds {
        &self.bounds
    }

    pub fn gene_span(&self) -> usize {
        self.gene_span
    }

    /// Same bounds and span, different weighting.
    pub fn with_model(&self, model: SimilarityModel) -> Result<Self> {
        SimilarityParams::new(model, self.bounds.clone(), self.gene_span)
    }

    /// Gene distances `1..=gene_span` of two genomes already in canonical form.
    pub fn gene_distances(&self, k: &Genome, l: &Genome) -> Result<Vec<f64>> {
        (1..=self.gene_span)
            .map(|m| gene_distance(k.gene(m), l.gene(m), m, &self.bounds))
            .collect()
    }

    /// `D = sum alpha(m) d_m` for two genomes already in canonical form.
    pub fn canonical_distance(&self, k: &Genome, l: &Genome) -> Result<f64> {
        Ok(self
            .gene_distances(k, l)?
            .iter()
            .enumerate()
            .map(|(i, d)| self.model.alpha(i + 1) * d)
            .sum())
    }
}

/// Weighted genome distance `D(k, l)`, computed on canonical forms.
pub fn genome_distance(k: &Genome, l: &Genome, params: &SimilarityParams) -> Result<f64> {
    params.canonical_distance(&normalize(k)?, &normalize(l)?)
}

/// Maps a distance to the index `100 / (1 + D)` percent.
pub fn index_from_distance(distance: f64) -> f64 {
    100.0 / (1.0 + distance)
}

/// Similarity index in percent, in `(0, 100]`.
pub fn similarity_index(k: &Genome, l: &Genome, params: &SimilarityParams) -> Result<f64> {
    Ok(index_from_distance(genome_distance(k, l, params)?))
}

/// Percentage attached to a level of the seven-step similarity scale.
pub fn level_to_percent(level: u8) -> Result<f64> {
    LEVEL_PERCENT
        .get(level as usize)
        .copied()
        .ok_or_else(|| Error::invalid(format!("similarity level {level} outside 0..=6")))
}
