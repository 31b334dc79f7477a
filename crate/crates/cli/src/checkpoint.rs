//! Checkpoint files: the config hash plus whatever state the command needs
//! to continue. Writes go through a temporary file and a rename so a killed
//! process never leaves a torn checkpoint behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint<S> {
    pub command: String,
    pub config_hash: String,
    /// Wall-clock milliseconds spent across all runs so far.
    pub elapsed_ms: u64,
    pub state: S,
}

pub fn config_hash<C: Serialize>(command: &str, config: &C) -> String {
    let body = serde_json::to_string(config).expect("config serializes");
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(body.as_bytes());
    hex::encode(h.finalize())
}

pub fn load<S: DeserializeOwned>(path: &Path, command: &str, hash: &str) -> Result<Option<Checkpoint<S>>, CliError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::io(path, e)),
    };
    let bad = |e: serde_json::Error| CliError::Usage(format!("checkpoint {}: {e}", path.display()));
    let raw: Checkpoint<serde_json::Value> = serde_json::from_str(&text).map_err(bad)?;
    if raw.command != command || raw.config_hash != hash {
        return Err(CliError::ConfigMismatch {
            path: path.to_path_buf(),
            expected: hash.to_string(),
            found: raw.config_hash,
        });
    }
    Ok(Some(Checkpoint {
        command: raw.command,
        config_hash: raw.config_hash,
        elapsed_ms: raw.elapsed_ms,
        state: serde_json::from_value(raw.state).map_err(bad)?,
    }))
}

pub fn store<S: Serialize>(path: &Path, cp: &Checkpoint<S>) -> Result<(), CliError> {
    let mut tmp = PathBuf::from(path);
    tmp.as_mut_os_string().push(".tmp");
    let body = serde_json::to_vec_pretty(cp).expect("checkpoint serializes");
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(&body).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
