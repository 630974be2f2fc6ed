//! Named scenarios kept as scenario files in one directory.

use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::http::StatusCode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use wallsense_core::scenario::{Scenario, ScenarioDoc, ScenarioError};

use crate::error::ApiError;

const MAX_NAME_LEN: usize = 64;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("scenario name must be 1-{MAX_NAME_LEN} characters from A-Z, a-z, 0-9, '-' and '_'")]
    BadName,
    #[error("no scenario named {0:?}")]
    NotFound(String),
    #[error("scenario {name:?} is at revision {current:?}, not {expected:?}")]
    Conflict {
        name: String,
        expected: String,
        current: Option<String>,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("stored scenario {name:?} is unreadable: {source}")]
    Corrupt { name: String, source: ScenarioError },
    #[error("scenario store i/o: {0}")]
    Io(#[from] io::Error),
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::BadName => ApiError::validation("name", e.to_string()),
            StoreError::NotFound(_) => ApiError::not_found(e.to_string()),
            StoreError::Conflict { .. } => {
                ApiError::new(StatusCode::CONFLICT, "conflict", e.to_string())
            }
            StoreError::Scenario(s) => ApiError::from(s).nested("scenario"),
            StoreError::Corrupt { .. } | StoreError::Io(_) => ApiError::internal(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub name: String,
    pub revision: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredScenario {
    pub name: String,
    pub revision: String,
    pub scenario: ScenarioDoc,
}

/// Body of a PUT. When `revision` is given the write only succeeds if the
/// stored scenario is currently at that revision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PutScenario {
    pub scenario: ScenarioDoc,
    #[serde(default)]
    pub revision: Option<String>,
}

/// Revision tag: leading 16 hex digits of the SHA-256 of the file bytes.
pub fn revision_of(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub struct ScenarioStore {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl ScenarioStore {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, name: &str) -> Result<PathBuf, StoreError> {
        let ok = !name.is_empty()
            && name.len() <= MAX_NAME_LEN
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if !ok {
            return Err(StoreError::BadName);
        }
        Ok(self.dir.join(format!("{name}.json")))
    }

    fn lock_for(&self, name: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table poisoned");
        locks.entry(name.to_string()).or_default().clone()
    }

    async fn read(&self, name: &str) -> Result<Option<Vec<u8>>, StoreError> {
        match tokio::fs::read(self.path(name)?).await {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Stored names in ascending order with their revisions.
    pub async fn list(&self) -> Result<Vec<ScenarioEntry>, StoreError> {
        let mut out = Vec::new();
        let mut entries = tokio::fs::read_dir(&self.dir).await?;
        while let Some(entry) = entries.next_entry().await? {
            let file_name = entry.file_name();
            let Some(name) = file_name.to_str().and_then(|n| n.strip_suffix(".json")) else {
                continue;
            };
            if self.path(name).is_err() {
                continue;
            }
            let bytes = tokio::fs::read(entry.path()).await?;
            out.push(ScenarioEntry {
                name: name.to_string(),
                revision: revision_of(&bytes),
            });
        }
        out.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(out)
    }

    pub async fn get(&self, name: &str) -> Result<StoredScenario, StoreError> {
        let bytes = self
            .read(name)
            .await?
            .ok_or_else(|| StoreError::NotFound(name.to_string()))?;
        let text = String::from_utf8_lossy(&bytes);
        let scenario = Scenario::from_json(&text).map_err(|source| StoreError::Corrupt {
            name: name.to_string(),
            source,
        })?;
        Ok(StoredScenario {
            name: name.to_string(),
            revision: revision_of(&bytes),
            scenario: scenario.to_doc(),
        })
    }

    /// Validates and writes the scenario in canonical formatting. Writes to
    /// one name are serialized; the file is replaced atomically.
    pub async fn put(&self, name: &str, body: &PutScenario) -> Result<StoredScenario, StoreError> {
        let path = self.path(name)?;
        let scenario = Scenario::from_doc(&body.scenario)?;
        let lock = self.lock_for(name);
        let _guard = lock.lock().await;
        if let Some(expected) = &body.revision {
            let current = self.read(name).await?.map(|b| revision_of(&b));
            if current.as_deref() != Some(expected.as_str()) {
                return Err(StoreError::Conflict {
                    name: name.to_string(),
                    expected: expected.clone(),
                    current,
                });
            }
        }
        let text = scenario.to_json();
        let tmp = self.dir.join(format!(".{name}.json.tmp"));
        tokio::fs::write(&tmp, text.as_bytes()).await?;
        tokio::fs::rename(&tmp, &path).await?;
        Ok(StoredScenario {
            name: name.to_string(),
            revision: revision_of(text.as_bytes()),
            scenario: scenario.to_doc(),
        })
    }
}
