use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Command;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to regenerate a run's CSV output byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Config file path, or `None` for the bundled Paris line 14 configuration.
    pub config: Option<PathBuf>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Subcommand name and its parameter grid.
    #[serde(flatten)]
    pub command: Command,
}

impl RunManifest {
    pub fn new(config: Option<&Path>, seed: u64, output_dir: &Path, command: Command) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.map(Path::to_path_buf),
            seed,
            output_dir: output_dir.to_path_buf(),
            command,
        }
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }

    pub fn write(&self) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(self.output_dir.join(MANIFEST_FILE), text)
    }
}
