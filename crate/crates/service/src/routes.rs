use std::sync::Arc;

use axum::extract::{FromRequest, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use fourier_iga_core::calibration::{calibrate, make_trial, CalibrationJudgment, HoldoutPair};
use fourier_iga_core::codec::{decode, ClosedCurve, Point};
use fourier_iga_core::harness::run_target_convergence;
use fourier_iga_core::session::{validate_curves, Mode, SessionConfig, SessionSetup};
use fourier_iga_core::similarity::{ModelKind, DEFAULT_GENE_SPAN};
use fourier_iga_core::{
    seeded_rng, CoefficientBounds, Error, GaConfig, Genome, IndividualId, Population, SimilarityParams,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{ApiError, ApiResult};
use crate::store::{corpus_bounds, corpus_genomes, Store, StoredTrial};

/// Individuals shown per evaluation page.
pub const PAGE_SIZE: usize = 6;
/// Points in every polyline sent to clients.
pub const PREVIEW_POINTS: usize = 400;

pub type AppState = Arc<Store>;

/// JSON body extractor whose rejections use the service error format.
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct Json<T>(pub T);

impl<T: Serialize> IntoResponse for Json<T> {
    fn into_response(self) -> Response {
        axum::Json(self.0).into_response()
    }
}

fn preview(genome: &Genome, precision: usize) -> ApiResult<Vec<Point>> {
    let p = precision.min(genome.harmonic_count()).max(1);
    Ok(decode(genome, p, PREVIEW_POINTS)?.points().to_vec())
}

/// A curve given either as `{"points": [...]}` or as a bare point list.
fn curve_points(i: usize, value: Value) -> ApiResult<Vec<Point>> {
    let value = match value {
        Value::Object(mut map) => map.remove("points").unwrap_or(Value::Null),
        other => other,
    };
    serde_json::from_value(value).map_err(|e| ApiError::validation(format!("curve {i}: {e}")))
}

#[derive(Deserialize)]
pub struct CreateSession {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    mode: Mode,
    #[serde(default)]
    config: Option<SessionConfig>,
    curves: Vec<Value>,
    #[serde(default)]
    params: Option<SimilarityParams>,
    #[serde(default)]
    target: Option<Genome>,
}

#[derive(Serialize)]
pub struct SessionView {
    id: String,
    mode: Mode,
    generation: u32,
    population_size: usize,
    graded: usize,
    completed_generations: usize,
    comparisons: usize,
    events: usize,
    config: SessionConfig,
    params: SimilarityParams,
}

async fn view(store: &Store, id: &str) -> ApiResult<SessionView> {
    let handle = store.session(id).await?;
    let s = handle.lock().await;
    Ok(SessionView {
        id: s.id().to_string(),
        mode: s.mode(),
        generation: s.generation_index(),
        population_size: s.population().len(),
        graded: s.population().individuals.iter().filter(|i| i.fitness.is_some()).count(),
        completed_generations: s.trace().entries.len(),
        comparisons: s.comparisons().len(),
        events: s.log().len(),
        config: s.config().clone(),
        params: s.params()?,
    })
}

pub async fn create_session(
    State(store): State<AppState>,
    Json(body): Json<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let raw = body
        .curves
        .into_iter()
        .enumerate()
        .map(|(i, v)| curve_points(i, v))
        .collect::<ApiResult<Vec<_>>>()?;
    let curves = validate_curves(raw)?;
    let id = body.id.unwrap_or_else(|| uuid::Uuid::new_v4().to_string());
    let setup = SessionSetup {
        id: id.clone(),
        mode: body.mode,
        config: body.config.unwrap_or_else(|| store.config.defaults.clone()),
        curves,
        params: body.params,
        target: body.target,
    };
    store.create_session(setup).await?;
    Ok((StatusCode::CREATED, Json(view(&store, &id).await?)))
}

pub async fn list_sessions(State(store): State<AppState>) -> Json<Value> {
    Json(json!({ "sessions": store.session_ids().await }))
}

pub async fn get_session(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    Ok(Json(view(&store, &id).await?))
}

#[derive(Deserialize)]
pub struct PageQuery {
    #[serde(default)]
    page: usize,
}

#[derive(Serialize)]
pub struct IndividualView {
    id: IndividualId,
    fitness: Option<f64>,
    generation_born: u32,
    parent_ids: Vec<IndividualId>,
    points: Vec<Point>,
}

#[derive(Serialize)]
pub struct GenerationPage {
    generation: u32,
    page: usize,
    page_size: usize,
    page_count: usize,
    total: usize,
    individuals: Vec<IndividualView>,
}

fn page_of(population: &Population, page: usize, precision: usize) -> ApiResult<GenerationPage> {
    let total = population.len();
    let page_count = total.div_ceil(PAGE_SIZE);
    if page >= page_count {
        return Err(ApiError::not_found(format!("page {page} of {page_count}")));
    }
    let individuals = population
        .individuals
        .iter()
        .skip(page * PAGE_SIZE)
        .take(PAGE_SIZE)
        .map(|ind| {
            Ok(IndividualView {
                id: ind.id,
                fitness: ind.fitness,
                generation_born: ind.generation_born,
                parent_ids: ind.parent_ids.clone(),
                points: preview(&ind.genome, precision)?,
            })
        })
        .collect::<ApiResult<Vec<_>>>()?;
    Ok(GenerationPage {
        generation: population.generation_index,
        page,
        page_size: PAGE_SIZE,
        page_count,
        total,
        individuals,
    })
}

pub async fn get_generation(
    State(store): State<AppState>,
    Path((id, n)): Path<(String, u32)>,
    Query(q): Query<PageQuery>,
) -> ApiResult<Json<GenerationPage>> {
    let handle = store.session(&id).await?;
    let s = handle.lock().await;
    let population = s
        .generation(n)
        .ok_or_else(|| ApiError::not_found(format!("generation {n} of session {id}")))?;
    Ok(Json(page_of(population, q.page, s.config().codec.decode_precision)?))
}

#[derive(Deserialize)]
pub struct GradeBody {
    individual_id: IndividualId,
    fitness: i64,
}

pub async fn post_grade(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<GradeBody>,
) -> ApiResult<Json<Value>> {
    let handle = store.session(&id).await?;
    let mut s = handle.lock().await;
    store.mutate(&mut s, |s| s.grade(body.individual_id, body.fitness))?;
    Ok(Json(json!({
        "individual_id": body.individual_id,
        "fitness": body.fitness,
        "generation": s.generation_index(),
    })))
}

pub async fn post_evolve(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = store.session(&id).await?;
    let mut s = handle.lock().await;
    let summary = store.mutate(&mut s, |s| s.step_generation())?;
    Ok(Json(summary).into_response())
}

#[derive(Deserialize)]
pub struct CompareBody {
    left: IndividualId,
    right: IndividualId,
    verdict: i8,
}

pub async fn post_comparison(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<CompareBody>,
) -> ApiResult<(StatusCode, Response)> {
    let handle = store.session(&id).await?;
    let mut s = handle.lock().await;
    store.mutate(&mut s, |s| s.compare(body.left, body.right, body.verdict))?;
    let recorded = s.comparisons().last().cloned();
    Ok((StatusCode::CREATED, Json(recorded).into_response()))
}

#[derive(Deserialize)]
pub struct MetricsQuery {
    #[serde(default)]
    format: Option<String>,
}

pub async fn get_metrics(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<MetricsQuery>,
) -> ApiResult<Response> {
    let handle = store.session(&id).await?;
    let s = handle.lock().await;
    match q.format.as_deref() {
        None | Some("json") => Ok(Json(s.trace().clone()).into_response()),
        Some("csv") => Ok(([(header::CONTENT_TYPE, "text/csv")], s.trace().to_csv()).into_response()),
        Some(other) => Err(ApiError::validation(format!("unknown format {other:?}; use json or csv"))),
    }
}

#[derive(Deserialize)]
pub struct TraceBody {
    points: Vec<Point>,
    #[serde(default)]
    harmonic_count: Option<usize>,
}

pub async fn post_trace(State(store): State<AppState>, Json(body): Json<TraceBody>) -> ApiResult<Json<Value>> {
    let mut codec = store.config.defaults.codec;
    if let Some(h) = body.harmonic_count {
        codec.harmonic_count = h;
        codec.decode_precision = codec.decode_precision.min(h);
    }
    codec.validate()?;
    let curve = ClosedCurve::new(body.points)?;
    let genome = codec.ingest(&curve)?;
    let points = preview(&genome, codec.decode_precision)?;
    Ok(Json(json!({ "genome": genome, "preview": points })))
}

#[derive(Deserialize)]
pub struct DecodeBody {
    genome: Genome,
    #[serde(default)]
    precision: Option<usize>,
    #[serde(default)]
    samples: Option<usize>,
}

pub async fn post_decode(State(store): State<AppState>, Json(body): Json<DecodeBody>) -> ApiResult<Json<Value>> {
    let precision = body
        .precision
        .unwrap_or_else(|| store.config.defaults.codec.decode_precision.min(body.genome.harmonic_count()));
    let curve = decode(&body.genome, precision, body.samples.unwrap_or(PREVIEW_POINTS))?;
    Ok(Json(json!({ "points": curve.points() })))
}

/// Reference bounds named by a request: a session's, explicit ones, or the
/// sample corpus's.
async fn reference_bounds(
    store: &Store,
    session_id: Option<&str>,
    bounds: Option<CoefficientBounds>,
) -> ApiResult<CoefficientBounds> {
    match (session_id, bounds) {
        (Some(_), Some(_)) => Err(ApiError::validation("give either session_id or bounds, not both")),
        (Some(id), None) => Ok(store.session(id).await?.lock().await.bounds().clone()),
        (None, Some(b)) => Ok(b),
        (None, None) => Ok(corpus_bounds().clone()),
    }
}

#[derive(Deserialize)]
pub struct TrialBody {
    base: Genome,
    gene_i: usize,
    gene_j: usize,
    #[serde(default = "default_scale")]
    perturbation_scale: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    session_id: Option<String>,
    #[serde(default)]
    bounds: Option<CoefficientBounds>,
}

fn default_scale() -> f64 {
    0.5
}

pub async fn post_trial(
    State(store): State<AppState>,
    Json(body): Json<TrialBody>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let bounds = reference_bounds(&store, body.session_id.as_deref(), body.bounds).await?;
    for g in [body.gene_i, body.gene_j] {
        if bounds.get(g as i64).is_none() {
            return Err(ApiError::validation(format!("gene {g} is outside the reference bounds")));
        }
    }
    let mut rng = seeded_rng(body.seed);
    let trial = make_trial(&body.base, body.gene_i, body.gene_j, body.perturbation_scale, &mut rng)?;
    let stored = StoredTrial {
        trial_id: uuid::Uuid::new_v4().to_string(),
        trial,
        bounds,
    };
    let precision = store.config.defaults.codec.decode_precision;
    let previews = json!({
        "base": preview(&stored.trial.base, precision)?,
        "variant1": preview(&stored.trial.variant1, precision)?,
        "variant2": preview(&stored.trial.variant2, precision)?,
    });
    let mut book = store.calibration.lock().await;
    store.persist_trial(&stored)?;
    book.trials.insert(stored.trial_id.clone(), stored.clone());
    Ok((
        StatusCode::CREATED,
        Json(json!({ "trial_id": stored.trial_id, "trial": stored.trial, "previews": previews })),
    ))
}

#[derive(Deserialize)]
pub struct JudgmentBody {
    trial_id: String,
    /// Final scale of gene j in the second variant, as set by the designer.
    #[serde(default)]
    variant2_factor: Option<f64>,
    iso_similar: bool,
    similarity_level: u8,
}

pub async fn post_judgment(
    State(store): State<AppState>,
    Json(body): Json<JudgmentBody>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let mut book = store.calibration.lock().await;
    let stored = book
        .trials
        .get(&body.trial_id)
        .ok_or_else(|| ApiError::not_found(format!("trial {}", body.trial_id)))?;
    let trial = match body.variant2_factor {
        Some(f) if !f.is_finite() => return Err(ApiError::validation("variant2_factor must be finite")),
        Some(f) => stored.trial.with_variant2_factor(f)?,
        None => stored.trial.clone(),
    };
    let judgment = CalibrationJudgment {
        trial,
        iso_similar: body.iso_similar,
        similarity_level: body.similarity_level,
    };
    let record = judgment.record(body.trial_id.clone(), &stored.bounds)?;
    store.persist_judgment(&record)?;
    book.judgments.push(record.clone());
    Ok((StatusCode::CREATED, Json(json!(record))))
}

#[derive(Deserialize)]
pub struct HoldoutBody {
    left: Genome,
    right: Genome,
    level: u8,
}

#[derive(Deserialize)]
pub struct FitBody {
    model: ModelKind,
    #[serde(default)]
    gene_span: Option<usize>,
    #[serde(default)]
    holdout: Vec<HoldoutBody>,
}

pub async fn post_fit(State(store): State<AppState>, Json(body): Json<FitBody>) -> ApiResult<Json<Value>> {
    let book = store.calibration.lock().await;
    let last = book
        .judgments
        .last()
        .ok_or_else(|| ApiError::conflict("no judgments recorded yet"))?;
    let bounds = book.trials[&last.trial_id].bounds.clone();
    if book.judgments.iter().any(|j| book.trials[&j.trial_id].bounds != bounds) {
        return Err(ApiError::conflict(
            "judgments were measured against different reference bounds",
        ));
    }
    let span = body.gene_span.unwrap_or(DEFAULT_GENE_SPAN).min(bounds.span());
    let holdout: Vec<HoldoutPair> = body.holdout.into_iter().map(|h| (h.left, h.right, h.level)).collect();
    let report = calibrate(&book.judgments, &bounds, span, body.model, &holdout)?;
    Ok(Json(json!(report)))
}

#[derive(Deserialize)]
pub struct TargetRunBody {
    target_genome: Genome,
    #[serde(default)]
    initial: Option<Vec<Genome>>,
    #[serde(default)]
    config: Option<GaConfig>,
    #[serde(default = "default_generations")]
    generations: u32,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    params: Option<SimilarityParams>,
}

fn default_generations() -> u32 {
    10
}

/// Upper bound on generations per request.
const MAX_GENERATIONS: u32 = 1000;

pub async fn post_target_run(Json(body): Json<TargetRunBody>) -> ApiResult<Json<Value>> {
    if body.generations > MAX_GENERATIONS {
        return Err(ApiError::validation(format!("at most {MAX_GENERATIONS} generations")));
    }
    let report = tokio::task::spawn_blocking(move || -> Result<Value, Error> {
        let initial = body.initial.unwrap_or_else(|| corpus_genomes().to_vec());
        let mut config = body.config.unwrap_or_else(GaConfig::automated);
        if let Some(seed) = body.seed {
            config.rng_seed = seed;
        }
        let params = match body.params {
            Some(p) => p,
            None => SimilarityParams::default_for(&initial)?,
        };
        let run = run_target_convergence(&body.target_genome, &initial, &config, &params, body.generations)?;
        let best_similarity = *run.best_similarity.last().expect("generation 0 is recorded");
        Ok(json!({
            "trace": run.trace.entries,
            "best_similarity": run.best_similarity,
            "best": {
                "id": run.best.id,
                "similarity": best_similarity,
                "genome": run.best.genome,
            },
        }))
    })
    .await
    .map_err(|e| ApiError::io(format!("target run aborted: {e}")))??;
    Ok(Json(report))
}
