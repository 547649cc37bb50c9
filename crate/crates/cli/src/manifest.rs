//! Run manifests: the resolved configuration of every invocation, echoed
//! next to its outputs so a run can be repeated exactly.

use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: serde_json::Value,
    pub unix_time_secs: u64,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        inputs: &[&Path],
        outputs: &[&Path],
        config: serde_json::Value,
    ) -> Self {
        let paths = |list: &[&Path]| {
            list.iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<String>>()
        };
        Self {
            subcommand: subcommand.to_string(),
            inputs: paths(inputs),
            outputs: paths(outputs),
            config,
            unix_time_secs: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Writes `manifest.json` (sorted keys) into the output directory.
    pub fn write(&self, out_dir: &Path) -> std::io::Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        let text = densefit_core::model_io::canonical_json(self)
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
