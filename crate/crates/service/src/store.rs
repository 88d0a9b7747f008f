//! One JSON file per session. Writes go to a temporary file in the same
//! directory and are renamed over the old one, so a reader sees either the
//! previous or the new complete record.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use uuid::Uuid;

use crate::api::SessionRecord;
use crate::error::{Result, ServiceError};

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, locks: Mutex::new(HashMap::new()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Ids are UUIDs; anything else cannot name a session file.
    fn path(&self, id: &str) -> Result<PathBuf> {
        let id = Uuid::parse_str(id).map_err(|_| ServiceError::NotFound(id.to_string()))?;
        Ok(self.dir.join(format!("{}.json", id.hyphenated())))
    }

    /// Exclusive lock serializing mutations of one session.
    pub fn lock(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut map = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(id.to_string()).or_default().clone()
    }

    pub fn load(&self, id: &str) -> Result<SessionRecord> {
        let path = self.path(id)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(ServiceError::NotFound(id.to_string())),
            Err(e) => return Err(e.into()),
        };
        serde_json::from_str(&text).map_err(|e| ServiceError::Storage(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, rec: &SessionRecord) -> Result<()> {
        let path = self.path(&rec.id)?;
        let text = serde_json::to_vec_pretty(rec).map_err(|e| ServiceError::Internal(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&text)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| ServiceError::Storage(e.to_string()))?;
        Ok(())
    }

    pub fn exists(&self, id: &str) -> bool {
        self.path(id).map(|p| p.exists()).unwrap_or(false)
    }

    /// Every readable session, oldest first.
    pub fn list(&self) -> Result<Vec<SessionRecord>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                if let Ok(rec) = self.load(stem) {
                    out.push(rec);
                }
            }
        }
        out.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
        Ok(out)
    }
}
