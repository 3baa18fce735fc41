//! Artifact persistence: every run writes its files through one writer so
//! the manifest can record checksums. CSV and JSON bodies are deterministic
//! for a fixed config and seed; wall-clock data goes to a separate sidecar
//! (`runinfo.json`) that is excluded from the manifest.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub artifacts: Vec<ArtifactEntry>,
    pub versions: Versions,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub vwslab: String,
    pub cli: String,
}

pub struct ArtifactWriter {
    dir: PathBuf,
    command: String,
    config: serde_json::Value,
    entries: Vec<ArtifactEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        s.push_str(&format!("{b:02x}"));
        s
    })
}

impl ArtifactWriter {
    pub fn new(dir: &Path, command: &str, config: serde_json::Value) -> anyhow::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config,
            entries: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write one artifact and record it for the manifest.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.entries.push(ArtifactEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> anyhow::Result<PathBuf> {
        self.write(name, text.as_bytes())
    }

    /// Serialize a report to pretty JSON with the config echo attached under
    /// a "config" key, matching the experiment report schema.
    pub fn write_report<T: Serialize>(&mut self, name: &str, report: &T) -> anyhow::Result<PathBuf> {
        let mut value = serde_json::to_value(report)?;
        if let serde_json::Value::Object(map) = &mut value {
            map.insert("config".into(), self.config.clone());
        }
        let body = serde_json::to_string_pretty(&value)? + "\n";
        self.write_text(name, &body)
    }

    /// Write the manifest (deterministic) and the timing sidecar (not).
    pub fn finish(mut self, started: std::time::Instant) -> anyhow::Result<()> {
        self.entries.sort_by(|a, b| a.name.cmp(&b.name));
        let manifest = Manifest {
            command: self.command.clone(),
            config: self.config.clone(),
            artifacts: self.entries.clone(),
            versions: Versions {
                vwslab: env!("CARGO_PKG_VERSION").to_string(),
                cli: env!("CARGO_PKG_VERSION").to_string(),
            },
        };
        let body = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(self.dir.join("manifest.json"), body)?;
        let runinfo = format!(
            "{{\"duration_ms\":{},\"finished_unix_ms\":{}}}\n",
            started.elapsed().as_millis(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
        );
        fs::write(self.dir.join("runinfo.json"), runinfo)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_and_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        let mut w =
            ArtifactWriter::new(tmp.path(), "demo", serde_json::json!({"seed": 1})).unwrap();
        w.write_text("a.csv", "epsilon,value\n0.5,1\n").unwrap();
        w.finish(std::time::Instant::now()).unwrap();
        let manifest: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(tmp.path().join("manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["command"], "demo");
        assert_eq!(manifest["artifacts"][0]["name"], "a.csv");
        assert_eq!(manifest["artifacts"][0]["sha256"].as_str().unwrap().len(), 64);
        assert!(tmp.path().join("runinfo.json").exists());
    }
}
