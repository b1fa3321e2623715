use std::path::{Path, PathBuf};

use fourier_iga_core::session::SessionConfig;
use serde::{Deserialize, Serialize};

/// Service settings, read from one JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub listen: String,
    /// Session logs and calibration records live here.
    pub data_dir: PathBuf,
    /// Used for new sessions that do not bring their own config, and for
    /// `/trace` and `/decode`.
    pub defaults: SessionConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: "127.0.0.1:8080".into(),
            data_dir: PathBuf::from("data"),
            defaults: SessionConfig::default(),
        }
    }
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let config: ServiceConfig =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        config.defaults.ga.validate().map_err(|e| e.to_string())?;
        config.defaults.codec.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}
