use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    /// SHA-256 of the effective configuration as exact JSON.
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    /// Wall-clock seconds; the only field that varies between reruns.
    pub duration_s: f64,
}

/// Collects manifest fields while a command runs.
pub struct ManifestBuilder {
    command: String,
    inputs: Vec<String>,
    config_hash: String,
    seed: u64,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new<C: Serialize + ?Sized>(
        command: &str,
        inputs: &[&Path],
        config: &C,
        seed: u64,
    ) -> Self {
        Self {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            config_hash: config_hash(config),
            seed,
            started: Instant::now(),
        }
    }

    pub fn finish(&self) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            inputs: self.inputs.clone(),
            config_hash: self.config_hash.clone(),
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_s: self.started.elapsed().as_secs_f64(),
        }
    }
}

pub fn config_hash<C: Serialize + ?Sized>(config: &C) -> String {
    let digest = Sha256::digest(hdk_core::io::to_json(config).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
