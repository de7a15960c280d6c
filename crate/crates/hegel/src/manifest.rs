//! Run manifests. Each stage records what it read and how it was configured;
//! the hash of that record (timestamp excluded) is stamped into every
//! artifact the stage writes.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::jsonl::write_atomic;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: Value,
    pub inputs: Vec<InputDigest>,
    pub hash: String,
    pub created_unix: u64,
}

#[derive(Serialize)]
struct Hashed<'a> {
    command: &'a str,
    tool_version: &'a str,
    seed: u64,
    config: &'a Value,
    inputs: &'a [InputDigest],
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: impl Serialize, inputs: &[&Path]) -> Result<Self> {
        let config = serde_json::to_value(config).expect("config serializes");
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.display().to_string(),
                    sha256: digest_path(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let hashed = Hashed {
            command,
            tool_version: TOOL_VERSION,
            seed,
            config: &config,
            inputs: &inputs,
        };
        let hash = hex::encode(Sha256::digest(
            serde_json::to_vec(&hashed).expect("manifest serializes"),
        ));
        let created_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(RunManifest {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            seed,
            config,
            inputs,
            hash,
            created_unix,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(path, text.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(path, "manifest", e.to_string()))
    }

    /// True when a manifest with the same hash already sits at `path`.
    pub fn matches_existing(&self, path: &Path) -> bool {
        RunManifest::read(path).is_ok_and(|m| m.hash == self.hash)
    }
}

/// Where the manifest for an artifact lives: inside a directory output, or
/// beside a file output.
pub fn manifest_path_for(output: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        output.join("run.json")
    } else {
        let mut name = output
            .file_name()
            .map(|n| n.to_os_string())
            .unwrap_or_default();
        name.push(".run.json");
        output.with_file_name(name)
    }
}

fn digest_file(path: &Path) -> Result<String> {
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex::encode(h.finalize()))
}

/// SHA-256 of a file, or of a directory's sorted `(name, digest)` listing.
/// Hidden files and the directory's own run manifest are skipped.
pub fn digest_path(path: &Path) -> Result<String> {
    if !path.is_dir() {
        return digest_file(path);
    }
    let mut names: Vec<String> = fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| !n.starts_with('.') && n != "run.json")
        .collect();
    names.sort();
    let mut h = Sha256::new();
    for n in names {
        h.update(n.as_bytes());
        h.update([0]);
        h.update(digest_file(&path.join(&n))?.as_bytes());
        h.update(b"\n");
    }
    Ok(hex::encode(h.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_time_and_tracks_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("in.jsonl");
        fs::write(&f, "a\n").unwrap();
        let a = RunManifest::new("oracle", 1, serde_json::json!({"max": 30}), &[&f]).unwrap();
        let mut b = RunManifest::new("oracle", 1, serde_json::json!({"max": 30}), &[&f]).unwrap();
        b.created_unix += 100;
        assert_eq!(a.hash, b.hash);
        let c = RunManifest::new("oracle", 2, serde_json::json!({"max": 30}), &[&f]).unwrap();
        assert_ne!(a.hash, c.hash);
        fs::write(&f, "b\n").unwrap();
        let d = RunManifest::new("oracle", 1, serde_json::json!({"max": 30}), &[&f]).unwrap();
        assert_ne!(a.hash, d.hash);

        let mp = manifest_path_for(&dir.path().join("labels.jsonl"), false);
        assert!(mp.ends_with("labels.jsonl.run.json"));
        d.write(&mp).unwrap();
        assert!(d.matches_existing(&mp));
        assert!(!a.matches_existing(&mp));
    }

    #[test]
    fn directory_digest_is_order_free() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b"), "2").unwrap();
        fs::write(dir.path().join("a"), "1").unwrap();
        let first = digest_path(dir.path()).unwrap();
        fs::write(dir.path().join("run.json"), "{}").unwrap();
        fs::write(dir.path().join(".tmp"), "x").unwrap();
        assert_eq!(digest_path(dir.path()).unwrap(), first);
        fs::write(dir.path().join("a"), "3").unwrap();
        assert_ne!(digest_path(dir.path()).unwrap(), first);
    }
}
