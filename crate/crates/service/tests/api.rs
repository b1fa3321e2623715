use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use fourier_iga_core::corpus::sample_corpus;
use fourier_iga_core::session::SessionConfig;
use fourier_iga_core::{CodecConfig, GaConfig, Genome};
use fourier_iga_service::{app, ServiceConfig, Store, PAGE_SIZE, PREVIEW_POINTS};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn small_defaults() -> SessionConfig {
    SessionConfig {
        ga: GaConfig::default().with_seed(5),
        codec: CodecConfig {
            harmonic_count: 20,
            interpolated_point_count: 300,
            decode_precision: 20,
            decode_sample_count: 300,
        },
    }
}

fn service(dir: &std::path::Path) -> Router {
    let config = ServiceConfig {
        data_dir: dir.to_path_buf(),
        defaults: small_defaults(),
        ..ServiceConfig::default()
    };
    app(Store::open(config).unwrap())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = call_text(app, method, uri, body.map(|b| b.to_string())).await;
    let value = serde_json::from_str(&text).unwrap_or(Value::String(text));
    (status, value)
}

async fn call_text(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(b) => {
            req = req.header("content-type", "application/json");
            Body::from(b)
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn corpus_curves(n: usize) -> Vec<Value> {
    sample_corpus()
        .into_iter()
        .take(n)
        .map(|c| json!(c))
        .collect()
}

async fn create(app: &Router, id: &str, n: usize) -> Value {
    let (status, body) = call(app, "POST", "/sessions", Some(json!({"id": id, "curves": corpus_curves(n)}))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body
}

#[tokio::test]
async fn session_creation_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    let body = create(&app, "alpha", 30).await;
    assert_eq!(body["population_size"], 30);
    assert_eq!(body["generation"], 0);
    assert_eq!(body["params"]["model"], "exponential");

    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"id": "alpha", "curves": corpus_curves(3)}))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, body) = call(&app, "POST", "/sessions", Some(json!({"curves": corpus_curves(1)}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "validation");

    let mut curves = corpus_curves(3);
    curves[2] = json!([[0.0, 0.0], [1.0, 0.0]]);
    let (status, body) = call(&app, "POST", "/sessions", Some(json!({"curves": curves}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["message"].as_str().unwrap().contains("curve 2"), "{body}");

    // bare point lists are accepted too
    let bare: Vec<Value> = corpus_curves(2).into_iter().map(|c| c["points"].clone()).collect();
    let (status, body) = call(&app, "POST", "/sessions", Some(json!({"curves": bare}))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");

    let (status, _) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (_, list) = call(&app, "GET", "/sessions", None).await;
    assert_eq!(list["sessions"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn malformed_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    let (status, _) = call_text(&app, "POST", "/sessions", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"curves": "three"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn generation_pages_carry_decoded_polylines() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    create(&app, "pages", 30).await;
    let (status, page) = call(&app, "GET", "/sessions/pages/generation/0?page=0", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(page["page_count"], 5);
    assert_eq!(page["total"], 30);
    let individuals = page["individuals"].as_array().unwrap();
    assert_eq!(individuals.len(), PAGE_SIZE);
    assert_eq!(individuals[0]["points"].as_array().unwrap().len(), PREVIEW_POINTS);
    assert!(individuals[0]["fitness"].is_null());

    let (_, last) = call(&app, "GET", "/sessions/pages/generation/0?page=4", None).await;
    assert_eq!(last["individuals"][0]["id"], 24);
    let (status, _) = call(&app, "GET", "/sessions/pages/generation/0?page=5", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", "/sessions/pages/generation/1", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn grading_and_evolution() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    create(&app, "g", 30).await;
    let grade = |id: u64, fitness: Value| json!({"individual_id": id, "fitness": fitness});

    let (status, body) = call(&app, "POST", "/sessions/g/evolve", None).await;
    assert_eq!(status, StatusCode::CONFLICT, "{body}");
    assert_eq!(body["error"], "precondition");

    let (status, _) = call(&app, "POST", "/sessions/g/grades", Some(grade(3, json!(7)))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, "POST", "/sessions/g/grades", Some(grade(3, json!(2.5)))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, "POST", "/sessions/g/grades", Some(grade(99, json!(3)))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/sessions/x/grades", Some(grade(1, json!(3)))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    for id in 0..30u64 {
        let (status, _) = call(&app, "POST", "/sessions/g/grades", Some(grade(id, json!(0)))).await;
        assert_eq!(status, StatusCode::OK);
    }
    let (status, _) = call(&app, "POST", "/sessions/g/evolve", None).await;
    assert_eq!(status, StatusCode::CONFLICT);

    call(&app, "POST", "/sessions/g/grades", Some(grade(4, json!(2)))).await;
    let (status, _) = call(&app, "POST", "/sessions/g/grades", Some(grade(4, json!(5)))).await;
    assert_eq!(status, StatusCode::OK);
    let (_, page) = call(&app, "GET", "/sessions/g/generation/0", None).await;
    assert_eq!(page["individuals"][4]["fitness"], 5.0);

    let (status, summary) = call(&app, "POST", "/sessions/g/evolve", None).await;
    assert_eq!(status, StatusCode::OK, "{summary}");
    assert_eq!(summary["generation"], 1);
    assert_eq!(summary["population_size"], 100);
    assert_eq!(summary["child_count"], 70);
    assert_eq!(summary["survivor_ids"].as_array().unwrap().len(), 30);

    let (_, view) = call(&app, "GET", "/sessions/g", None).await;
    assert_eq!(view["generation"], 1);
    assert_eq!(view["completed_generations"], 1);
    assert_eq!(view["events"], 1 + 30 + 2 + 1);

    let (status, csv) = call_text(&app, "GET", "/sessions/g/metrics?format=csv", None).await;
    assert_eq!(status, StatusCode::OK);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "generation,avg_fitness,best_fitness,avg_similarity");
    assert!(lines[1].starts_with("0,"));
    let (_, metrics) = call(&app, "GET", "/sessions/g/metrics", None).await;
    assert_eq!(metrics["entries"][0]["best_fitness"], 5.0);
    let (status, _) = call(&app, "GET", "/sessions/g/metrics?format=xml", None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, c) = call(&app, "POST", "/sessions/g/comparisons", Some(json!({"left": 4, "right": 40, "verdict": -2}))).await;
    assert_eq!(status, StatusCode::CREATED, "{c}");
    let (status, _) = call(&app, "POST", "/sessions/g/comparisons", Some(json!({"left": 4, "right": 40, "verdict": 4}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn evolution_is_deterministic_per_seed() {
    let mut pages = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let app = service(dir.path());
        create(&app, "d", 10).await;
        call(&app, "POST", "/sessions/d/grades", Some(json!({"individual_id": 2, "fitness": 6}))).await;
        call(&app, "POST", "/sessions/d/grades", Some(json!({"individual_id": 7, "fitness": 3}))).await;
        call(&app, "POST", "/sessions/d/evolve", None).await;
        let (_, page) = call(&app, "GET", "/sessions/d/generation/1?page=3", None).await;
        pages.push(page);
    }
    assert_eq!(pages[0], pages[1]);
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let before = {
        let app = service(dir.path());
        create(&app, "keep", 8).await;
        call(&app, "POST", "/sessions/keep/grades", Some(json!({"individual_id": 1, "fitness": 4}))).await;
        call(&app, "POST", "/sessions/keep/evolve", None).await;
        call(&app, "POST", "/sessions/keep/grades", Some(json!({"individual_id": 20, "fitness": 6}))).await;
        let (_, page) = call(&app, "GET", "/sessions/keep/generation/1?page=3", None).await;
        let (_, view) = call(&app, "GET", "/sessions/keep", None).await;
        (page, view)
    };
    let app = service(dir.path());
    let (_, page) = call(&app, "GET", "/sessions/keep/generation/1?page=3", None).await;
    let (_, view) = call(&app, "GET", "/sessions/keep", None).await;
    assert_eq!((page, view), before);
}

#[tokio::test]
async fn concurrent_grades_are_all_kept() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    create(&app, "c", 24).await;
    let mut tasks = Vec::new();
    for id in 0..24u64 {
        let app = app.clone();
        tasks.push(tokio::spawn(async move {
            call(&app, "POST", "/sessions/c/grades", Some(json!({"individual_id": id, "fitness": (id % 6) + 1}))).await.0
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let (_, view) = call(&app, "GET", "/sessions/c", None).await;
    assert_eq!(view["graded"], 24);
    assert_eq!(view["events"], 25);
    let text = std::fs::read_to_string(dir.path().join("sessions/c.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 25);
}

#[tokio::test]
async fn trace_and_decode() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    let curve = json!(sample_corpus()[0]);
    let (status, body) = call(&app, "POST", "/trace", Some(json!({"points": curve["points"]}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["preview"].as_array().unwrap().len(), PREVIEW_POINTS);
    let genome: Genome = serde_json::from_value(body["genome"].clone()).unwrap();
    assert_eq!(genome.harmonic_count(), 20);

    let (status, _) = call(&app, "POST", "/trace", Some(json!({"points": [[0, 0], [1, 1]]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let circle = json!({"harmonic_count": 1, "coeffs": [[0, 0], [0, 0], [1, 0]]});
    let (status, body) = call(&app, "POST", "/decode", Some(json!({"genome": circle, "samples": 4}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    for (p, e) in body["points"].as_array().unwrap().iter().zip(expected) {
        assert!((p[0].as_f64().unwrap() - e[0]).abs() < 1e-12);
        assert!((p[1].as_f64().unwrap() - e[1]).abs() < 1e-12);
    }
    let (status, _) = call(&app, "POST", "/decode", Some(json!({"genome": circle, "precision": 3}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

async fn traced_genome(app: &Router, index: usize) -> Value {
    let curve = json!(sample_corpus()[index]);
    call(app, "POST", "/trace", Some(json!({"points": curve["points"]}))).await.1["genome"].clone()
}

#[tokio::test]
async fn calibration_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    let (status, _) = call(&app, "POST", "/calibration/fit", Some(json!({"model": "exponential"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    create(&app, "cal", 10).await;
    let base = traced_genome(&app, 3).await;
    let pairs = [(1, 2), (2, 3), (3, 4), (1, 4), (4, 6), (2, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 10), (1, 10)];
    for (k, (i, j)) in pairs.iter().enumerate() {
        let body = json!({"base": base, "gene_i": i, "gene_j": j, "seed": k, "session_id": "cal"});
        let (status, trial) = call(&app, "POST", "/calibration/trials", Some(body)).await;
        assert_eq!(status, StatusCode::CREATED, "{trial}");
        assert_eq!(trial["previews"]["variant2"].as_array().unwrap().len(), PREVIEW_POINTS);
        let judgment = json!({
            "trial_id": trial["trial_id"],
            "variant2_factor": 1.3,
            "iso_similar": true,
            "similarity_level": 3 + (k % 3),
        });
        let (status, record) = call(&app, "POST", "/calibration/judgments", Some(judgment)).await;
        assert_eq!(status, StatusCode::CREATED, "{record}");
        assert_eq!(record["gene_j"], *j);
    }
    let (status, _) = call(&app, "POST", "/calibration/judgments", Some(json!({"trial_id": "none", "iso_similar": true, "similarity_level": 3}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, report) = call(&app, "POST", "/calibration/fit", Some(json!({"model": "exponential"}))).await;
    assert_eq!(status, StatusCode::OK, "{report}");
    assert_eq!(report["params"]["model"], "exponential");
    assert!(report["params"]["a"].as_f64().unwrap() > 0.0);
    let (status, report) = call(&app, "POST", "/calibration/fit", Some(json!({"model": "weighted"}))).await;
    assert_eq!(status, StatusCode::OK, "{report}");
    assert_eq!(report["params"]["weights"].as_array().unwrap().len(), 10);
    assert_eq!(report["weights"][0], 1.0);

    // judgments persist across a restart
    let app = service(dir.path());
    let (status, _) = call(&app, "POST", "/calibration/fit", Some(json!({"model": "exp"}))).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn target_run_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let app = service(dir.path());
    let mut genomes = Vec::new();
    for i in 0..7 {
        genomes.push(traced_genome(&app, i).await);
    }
    let body = json!({
        "target_genome": genomes[0],
        "initial": genomes[1..],
        "generations": 2,
        "seed": 11,
    });
    let (status, first) = call(&app, "POST", "/harness/target-run", Some(body.clone())).await;
    assert_eq!(status, StatusCode::OK, "{first}");
    assert_eq!(first["trace"].as_array().unwrap().len(), 3);
    assert_eq!(first["best_similarity"].as_array().unwrap().len(), 3);
    let (_, second) = call(&app, "POST", "/harness/target-run", Some(body)).await;
    assert_eq!(first, second);

    let body = json!({"target_genome": genomes[2], "initial": genomes[1..], "generations": 1});
    let (status, err) = call(&app, "POST", "/harness/target-run", Some(body)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{err}");
}
