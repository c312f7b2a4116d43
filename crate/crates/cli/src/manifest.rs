use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Record written next to every output file. `arguments` is the exact
/// argument list after the program name, which `replay` feeds back in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub arguments: Vec<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        arguments: &[String],
        parameters: serde_json::Value,
        seed: Option<u64>,
        outputs: &[&Path],
    ) -> Self {
        Self {
            subcommand: subcommand.to_owned(),
            arguments: arguments.to_vec(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// `fig1.csv` -> `fig1.csv.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid manifest {}: {e}", path.display()))
}
