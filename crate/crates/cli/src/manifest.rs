//! `manifest.json`, written next to every result file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub base_seed: u64,
    /// Input path → SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub version: String,
    /// Seconds since the Unix epoch; 0 when timing is omitted.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>, base_seed: u64, omit_timing: bool) -> Self {
        let timestamp = if omit_timing {
            0
        } else {
            SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
        };
        Self {
            command: command.to_string(),
            config,
            base_seed,
            inputs: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }

    /// Records the digest of an input file.
    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(dir.join("manifest.json"), text).with_context(|| format!("writing manifest in {}", dir.display()))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
