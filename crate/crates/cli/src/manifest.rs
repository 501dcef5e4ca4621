//! Run manifests: enough recorded state to reproduce any run byte for byte.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::util::{sha256_file, CmdResult};

#[derive(Serialize)]
pub struct SetSizes {
    pub positives: usize,
    pub spies: usize,
    pub reliable_negatives: usize,
    pub residual_unlabeled: usize,
}

/// Everything notable about a run: the command line, resolved configuration,
/// seeds, input and output digests, set sizes, spy threshold and timings.
/// Timings vary run to run; every other field — and every output file — is
/// reproducible from the recorded command line and seeds.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub sub_seeds: BTreeMap<String, u64>,
    pub config: serde_json::Value,
    pub input_digests: BTreeMap<String, String>,
    pub output_digests: BTreeMap<String, String>,
    pub set_sizes: Option<SetSizes>,
    pub spy_threshold: Option<f64>,
    pub timings_ms: BTreeMap<String, u128>,
    #[serde(skip)]
    started: Instant,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            seed: None,
            sub_seeds: BTreeMap::new(),
            config: serde_json::Value::Null,
            input_digests: BTreeMap::new(),
            output_digests: BTreeMap::new(),
            set_sizes: None,
            spy_threshold: None,
            timings_ms: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn record_input(&mut self, path: &Path) {
        if let Ok(digest) = sha256_file(path) {
            self.input_digests
                .insert(path.display().to_string(), digest);
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        if let Ok(digest) = sha256_file(path) {
            self.output_digests
                .insert(path.display().to_string(), digest);
        }
    }

    pub fn mark(&mut self, stage: &str) {
        self.timings_ms
            .insert(stage.to_string(), self.started.elapsed().as_millis());
    }

    pub fn write(&mut self, out_dir: &Path) -> CmdResult {
        self.mark("total");
        let path = out_dir.join("run_manifest.json");
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, json).map_err(crate::util::data)?;
        Ok(())
    }
}
