use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub flags: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    /// Command-specific results (convergence flags, scores, timings).
    pub details: BTreeMap<String, Value>,
    pub wall_seconds: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn start(command: &str) -> Self {
        Self {
            tool: "betamix",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            flags: BTreeMap::new(),
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: BTreeMap::new(),
            wall_seconds: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn flag(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        self.flags.insert(name.into(), serde_json::to_value(value).expect("flag values serialize"));
        self
    }

    pub fn detail(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        self.details.insert(name.into(), serde_json::to_value(value).expect("details serialize"));
        self
    }

    /// Stop the clock and write the manifest to `path`.
    pub fn finish(&mut self, path: &Path) -> std::io::Result<()> {
        if let Some(t) = self.started.take() {
            self.wall_seconds = t.elapsed().as_secs_f64();
        }
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text)
    }
}

/// `out.csv` -> `out.csv.manifest.json`
pub fn path_for(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
