use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One emitted file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub resolution: usize,
    /// `series`, `korn` or `checkpoint`.
    pub kind: String,
    /// Extra qualifier, e.g. `perturbed-3` or `seed-7`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Summary of one experiment run, written as JSON next to its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub experiment: String,
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub resolutions: Vec<usize>,
    pub outputs: Vec<OutputFile>,
    /// Named scalar results, e.g. `order_rho`.
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl RunManifest {
    pub fn new(name: &str, experiment: &str, config_hash: String, seed: u64, resolutions: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            experiment: experiment.into(),
            config_hash,
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            resolutions,
            outputs: Vec::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn series(&self) -> impl Iterator<Item = &OutputFile> {
        self.outputs.iter().filter(|o| o.kind == "series")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(missing) = self.outputs.iter().find(|o| !o.path.exists()) {
            return Err(Error::Structural(format!(
                "declared output {} was not written",
                missing.path.display()
            )));
        }
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_fold_into_the_verdict() {
        let mut m = RunManifest::new("x", "equilibrium", "00".into(), 1, vec![8]);
        m.check("a", true, "");
        assert!(m.passed);
        m.check("b", false, "too big");
        m.check("c", true, "");
        assert!(!m.passed);
        assert_eq!(m.failed_checks().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["b"]);
    }

    #[test]
    fn json_round_trip_and_missing_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("s.csv");
        std::fs::write(&file, "").unwrap();
        let mut m = RunManifest::new("x", "equilibrium", "ab".into(), 1, vec![8]);
        m.metric("order_rho", 1.25);
        m.outputs.push(OutputFile {
            resolution: 8,
            kind: "series".into(),
            label: None,
            path: file.clone(),
        });
        let path = dir.path().join("manifest.json");
        m.write(&path).unwrap();
        assert_eq!(RunManifest::read(&path).unwrap(), m);

        m.outputs.push(OutputFile {
            resolution: 16,
            kind: "series".into(),
            label: None,
            path: dir.path().join("gone.csv"),
        });
        assert!(matches!(m.write(&path), Err(Error::Structural(_))));
    }
}
