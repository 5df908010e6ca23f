//! The JSON record every run leaves beside its outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pctlwb::geometry::GadgetConstants;
use pctlwb::rational::fmt_fraction;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Input path to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    /// Output path to SHA-256 of what was written.
    pub outputs: BTreeMap<String, String>,
    pub constants: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fragment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub seed: u64,
    pub timings_ms: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, String>,
    pub notes: Vec<String>,
    /// Atom universe of an emitted formula.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<String>,
    /// `states[id]` describes chain state `id` of an emitted witness.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> RunManifest {
        RunManifest { command: command.into(), seed, ..RunManifest::default() }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(path.display().to_string(), digest(bytes));
    }

    pub fn output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.insert(path.display().to_string(), digest(bytes));
    }

    pub fn constants(&mut self, c: &GadgetConstants) {
        let mut put = |k: &str, v: String| {
            self.constants.insert(k.into(), v);
        };
        put("lambda", fmt_fraction(&c.lambda));
        put("z1", fmt_fraction(&c.z.v1));
        put("z2", fmt_fraction(&c.z.v2));
        put("delta", fmt_fraction(&c.delta));
        put("rho", fmt_fraction(&c.rho));
        put("i_lo", fmt_fraction(&c.i_lo));
        put("i_hi", fmt_fraction(&c.i_hi));
    }

    pub fn verdict(&mut self, key: impl Into<String>, value: impl ToString) {
        self.verdicts.insert(key.into(), value.to_string());
    }

    pub fn time(&mut self, stage: &str, since: std::time::Instant) {
        self.timings_ms.insert(stage.into(), since.elapsed().as_secs_f64() * 1e3);
    }

    /// The manifest with timings cleared, for comparing runs.
    pub fn without_timings(&self) -> RunManifest {
        RunManifest { timings_ms: BTreeMap::new(), ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `OUT.manifest` for output path `OUT`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}
