//! Run manifests: every command that writes files also writes a manifest
//! recording the invocation, seeds, thresholds, tool version and the sha256
//! of each output, so a run can be audited and reproduced byte-for-byte
//! (timestamps aside).

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub tool_version: &'static str,
    pub timestamp_unix: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<invmax::exponent::FamilySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_quantile: Option<f64>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub settings: serde_json::Value,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            argv: std::env::args().collect(),
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            family: None,
            seed: None,
            threshold_quantile: None,
            settings: serde_json::Value::Null,
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path, contents: &str) {
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        self.outputs.push(OutputRecord { path: path.display().to_string(), sha256: hex });
    }

    /// Write `<primary output>.manifest.json`.
    pub fn write_alongside(&self, primary: &Path) -> std::io::Result<PathBuf> {
        let mut name = primary.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path = primary.with_file_name(name);
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, body)?;
        Ok(path)
    }
}
