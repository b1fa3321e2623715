//! In-memory state backed by append-only JSONL files.
//!
//! Layout under the data directory:
//! `sessions/<id>.jsonl` holds one session log each, and `calibration/`
//! holds `trials.jsonl` and `judgments.jsonl`.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use fourier_iga_core::calibration::{CalibrationTrial, JudgmentRecord};
use fourier_iga_core::corpus::sample_corpus;
use fourier_iga_core::session::{event_line, parse_jsonl, Session, SessionSetup};
use fourier_iga_core::similarity::{compute_bounds, CoefficientBounds, DEFAULT_GENE_SPAN};
use fourier_iga_core::{CodecConfig, Genome};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, RwLock};

use crate::error::{ApiError, ApiResult};
use crate::ServiceConfig;

/// A trial together with the bounds its distances are measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredTrial {
    pub trial_id: String,
    pub trial: CalibrationTrial,
    pub bounds: CoefficientBounds,
}

#[derive(Debug, Default)]
pub struct CalibrationBook {
    pub trials: HashMap<String, StoredTrial>,
    pub judgments: Vec<JudgmentRecord>,
}

pub type SessionHandle = Arc<Mutex<Session>>;

pub struct Store {
    pub config: ServiceConfig,
    sessions: RwLock<HashMap<String, SessionHandle>>,
    pub calibration: Mutex<CalibrationBook>,
}

fn append_line(path: &Path, line: &str, create_new: bool) -> std::io::Result<()> {
    let mut file = if create_new {
        OpenOptions::new().write(true).create_new(true).open(path)?
    } else {
        OpenOptions::new().append(true).create(true).open(path)?
    };
    file.write_all(line.as_bytes())?;
    file.write_all(b"\n")?;
    file.sync_data()
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, String> {
    match fs::read_to_string(path) {
        Ok(text) => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("{}:{}: {e}", path.display(), i + 1)))
            .collect(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

impl Store {
    /// Opens the data directory, replaying every stored session.
    pub fn open(config: ServiceConfig) -> Result<Store, String> {
        let store = Store {
            sessions: RwLock::new(HashMap::new()),
            calibration: Mutex::new(CalibrationBook::default()),
            config,
        };
        for dir in [store.sessions_dir(), store.calibration_dir()] {
            fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        }
        let mut sessions = HashMap::new();
        let entries = fs::read_dir(store.sessions_dir()).map_err(|e| e.to_string())?;
        for entry in entries {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let session = Session::from_jsonl(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            sessions.insert(session.id().to_string(), Arc::new(Mutex::new(session)));
        }
        let mut book = CalibrationBook::default();
        for t in read_jsonl::<StoredTrial>(&store.calibration_dir().join("trials.jsonl"))? {
            book.trials.insert(t.trial_id.clone(), t);
        }
        book.judgments = read_jsonl(&store.calibration_dir().join("judgments.jsonl"))?;
        Ok(Store {
            sessions: RwLock::new(sessions),
            calibration: Mutex::new(book),
            ..store
        })
    }

    fn sessions_dir(&self) -> PathBuf {
        self.config.data_dir.join("sessions")
    }

    fn calibration_dir(&self) -> PathBuf {
        self.config.data_dir.join("calibration")
    }

    fn session_path(&self, id: &str) -> PathBuf {
        self.sessions_dir().join(format!("{id}.jsonl"))
    }

    pub async fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().await.keys().cloned().collect();
        ids.sort();
        ids
    }

    pub async fn session(&self, id: &str) -> ApiResult<SessionHandle> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("session {id}")))
    }

    pub async fn create_session(&self, setup: SessionSetup) -> ApiResult<SessionHandle> {
        let mut sessions = self.sessions.write().await;
        if sessions.contains_key(&setup.id) {
            return Err(ApiError::conflict(format!("session {} already exists", setup.id)));
        }
        let session = Session::create(setup)?;
        append_line(&self.session_path(session.id()), &event_line(&session.log()[0]), true)?;
        let handle = Arc::new(Mutex::new(session));
        sessions.insert(handle.lock().await.id().to_string(), handle.clone());
        Ok(handle)
    }

    /// Runs a mutation on a locked session and persists the events it
    /// appended. On a write failure the session is rebuilt from disk.
    pub fn mutate<T>(
        &self,
        session: &mut Session,
        op: impl FnOnce(&mut Session) -> fourier_iga_core::Result<T>,
    ) -> ApiResult<T> {
        let before = session.log().len();
        let out = op(session)?;
        let path = self.session_path(session.id());
        let written = session.log()[before..]
            .iter()
            .try_for_each(|e| append_line(&path, &event_line(e), false));
        if let Err(e) = written {
            let restored = fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|t| parse_jsonl(&t).map_err(|e| e.to_string()))
                .and_then(|events| Session::replay(&events).map_err(|e| e.to_string()));
            if let Ok(restored) = restored {
                *session = restored;
            }
            return Err(ApiError::io(format!("could not persist session log: {e}")));
        }
        Ok(out)
    }

    pub fn persist_trial(&self, trial: &StoredTrial) -> ApiResult<()> {
        append_line(
            &self.calibration_dir().join("trials.jsonl"),
            &serde_json::to_string(trial).expect("trials serialize"),
            false,
        )?;
        Ok(())
    }

    pub fn persist_judgment(&self, record: &JudgmentRecord) -> ApiResult<()> {
        append_line(
            &self.calibration_dir().join("judgments.jsonl"),
            &serde_json::to_string(record).expect("records serialize"),
            false,
        )?;
        Ok(())
    }
}

/// Bundled sample corpus as canonical genomes, ingested once.
pub fn corpus_genomes() -> &'static [Genome] {
    static GENOMES: OnceLock<Vec<Genome>> = OnceLock::new();
    GENOMES.get_or_init(|| {
        let codec = CodecConfig::default();
        sample_corpus()
            .iter()
            .map(|c| codec.ingest(c).expect("sample corpus ingests"))
            .collect()
    })
}

/// Bounds of the sample corpus, the reference when a request names none.
pub fn corpus_bounds() -> &'static CoefficientBounds {
    static BOUNDS: OnceLock<CoefficientBounds> = OnceLock::new();
    BOUNDS.get_or_init(|| compute_bounds(corpus_genomes(), DEFAULT_GENE_SPAN).expect("corpus bounds"))
}
