//! Result artifacts: self-describing JSON run records and dataset files.
//!
//! A record carries the command that produced it, the graph, the engine, the
//! spectrum and any optional payloads; re-running the echoed command with the
//! recorded seed reproduces the numeric payload bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::fit::{AreaLawFit, ScalingDataset};
use crate::spectrum::EntropySpectrum;
use crate::Result;

pub const ARTIFACT_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub graph: Value,
    pub engine: String,
    pub spectrum: EntropySpectrum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<AreaLawFit>,
    pub timestamp_unix: u64,
    pub artifact_version: String,
}

impl RunRecord {
    pub fn new(command: String, graph: Value, engine: &str, spectrum: EntropySpectrum) -> Self {
        RunRecord {
            command,
            graph,
            engine: engine.to_string(),
            spectrum,
            entropy_stderr: None,
            overlap: None,
            fit: None,
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            artifact_version: ARTIFACT_VERSION.to_string(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<RunRecord> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

pub fn write_dataset(data: &ScalingDataset, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(data)?)?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<ScalingDataset> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Two-column gnuplot-ready file.
pub fn write_plot_data(rows: &[(f64, f64)], path: &Path) -> Result<()> {
    let mut out = String::new();
    for (x, y) in rows {
        out.push_str(&format!("{x} {y:.9}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::entropy_from_spectrum;

    #[test]
    fn record_round_trip() {
        let dir = std::env::temp_dir().join(format!("vbsee-record-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let spectrum = entropy_from_spectrum(&[1.0, 1.0], 1).unwrap();
        let rec = RunRecord::new(
            "entropy --family square --nx 1 --ny 1 --engine ed".into(),
            serde_json::json!({"family": "square(1,1)"}),
            "ed",
            spectrum,
        );
        let path = dir.join("rec.json");
        rec.write(&path).unwrap();
        let back = RunRecord::read(&path).unwrap();
        assert_eq!(back.engine, "ed");
        assert_eq!(back.spectrum.eigenvalues, rec.spectrum.eigenvalues);
        assert_eq!(back.artifact_version, ARTIFACT_VERSION);
        std::fs::remove_dir_all(&dir).ok();
    }
}
