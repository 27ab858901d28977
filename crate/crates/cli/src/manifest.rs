use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

/// Everything that determines a report's content. No timestamps, so equal
/// manifests give byte-identical output.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<InputFile>,
    pub window: Option<Window>,
    pub params: BTreeMap<&'static str, serde_json::Value>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Window {
    pub from: chrono::NaiveDate,
    pub to: chrono::NaiveDate,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: Vec::new(),
            window: None,
            params: BTreeMap::new(),
            seed: None,
        }
    }

    /// Hashes the file and returns its bytes for parsing.
    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<Vec<u8>> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        self.inputs.push(InputFile {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        Ok(bytes)
    }

    pub fn param(&mut self, name: &'static str, value: impl Serialize) {
        self.params
            .insert(name, serde_json::to_value(value).expect("parameters serialize"));
    }
}
