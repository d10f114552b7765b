//! Content-addressed result cache. Entries store their own digest so that
//! tampering is detected on read.

use std::path::{Path, PathBuf};

use borcherds_core::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    digest: String,
    payload: String,
}

pub struct Cache {
    dir: Option<PathBuf>,
}

fn sha(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

pub fn key(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(dir: Option<&Path>) -> Cache {
        Cache { dir: dir.map(Path::to_path_buf) }
    }

    fn read(&self, path: &Path, key: &str) -> Option<String> {
        let text = std::fs::read_to_string(path).ok()?;
        match serde_json::from_str::<Entry>(&text) {
            Ok(e) if e.key == key && e.digest == sha(&e.payload) => Some(e.payload),
            _ => {
                eprintln!("warning: discarding corrupt cache entry {}", path.display());
                None
            }
        }
    }

    /// Returns the cached payload for `key`, computing and storing it on a miss.
    pub fn get_or_compute(&self, key: &str, compute: impl FnOnce() -> Result<String>) -> Result<String> {
        let Some(dir) = &self.dir else {
            return compute();
        };
        let path = dir.join(format!("{key}.json"));
        if path.exists() {
            if let Some(p) = self.read(&path, key) {
                return Ok(p);
            }
        }
        let payload = compute()?;
        let entry = Entry { key: key.to_string(), digest: sha(&payload), payload: payload.clone() };
        // write-then-rename keeps concurrent writers of the same key safe
        if std::fs::create_dir_all(dir).is_ok() {
            let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
            if std::fs::write(&tmp, serde_json::to_string(&entry).expect("serializable")).is_ok() {
                let _ = std::fs::rename(&tmp, &path);
            }
        }
        Ok(payload)
    }
}
