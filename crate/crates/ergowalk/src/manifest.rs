use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Config;
use crate::output::sha256_hex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the run directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// Headline outcome: a short phrase plus the numbers behind it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub summary: String,
    pub metrics: BTreeMap<String, Value>,
}

impl Verdict {
    pub fn new(summary: impl Into<String>) -> Self {
        Self { summary: summary.into(), metrics: BTreeMap::new() }
    }

    pub fn metric(mut self, key: &str, value: impl Serialize) -> Self {
        self.metrics.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

/// Everything needed to audit a run. Wall-clock data lives only here, so the
/// listed artifacts are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub versions: BTreeMap<String, String>,
    pub scenario: String,
    pub master_seed: u64,
    /// Effective configuration, defaults included.
    pub config: Config,
    pub created: String,
    pub threads: usize,
    pub stage_seconds: Vec<StageTime>,
    pub files: Vec<FileEntry>,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl RunManifest {
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }

    /// Files under `dir` whose digest no longer matches, with the reason.
    pub fn verify(&self, dir: &Path) -> Vec<(String, String)> {
        self.files
            .iter()
            .filter_map(|f| match std::fs::read(dir.join(&f.path)) {
                Ok(b) if sha256_hex(&b) == f.sha256 => None,
                Ok(_) => Some((f.path.clone(), "digest mismatch".to_string())),
                Err(e) => Some((f.path.clone(), e.to_string())),
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut s = format!("scenario   {}\nseed       {}\ncreated    {}\nstatus     {:?}\n", self.scenario, self.master_seed, self.created, self.status);
        if let Some(e) = &self.error {
            s.push_str(&format!("error      {e}\n"));
        }
        if let Some(v) = &self.verdict {
            s.push_str(&format!("verdict    {}\n", v.summary));
            for (k, val) in &v.metrics {
                s.push_str(&format!("  {k:<28} {val}\n"));
            }
        }
        s.push_str("stages\n");
        for t in &self.stage_seconds {
            s.push_str(&format!("  {:<28} {:.3}s\n", t.stage, t.seconds));
        }
        s.push_str("files\n");
        for f in &self.files {
            s.push_str(&format!("  {:<28} {:>10} B  {}\n", f.path, f.bytes, &f.sha256[..16]));
        }
        s
    }
}
