//! Versioned JSON run reports.
//!
//! Every CLI command emits one report object with `"schema": 1`. All
//! run-dependent but physics-irrelevant information (wall-clock timestamp,
//! tool version) is confined to the trailing `meta` block, so two runs with
//! identical configuration, seed and inputs produce byte-identical reports
//! once `meta` is stripped — the property [`strip_meta`] exists to test.

use std::path::Path;
use std::time::SystemTime;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Schema version of the report format emitted by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Run-identifying information that intentionally varies between runs.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub timestamp_utc: String,
    pub tool_version: String,
}

/// One command's results: configuration echoed back, named result values,
/// warnings, and the files written alongside.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
    pub meta: Meta,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            config: Value::Null,
            results: Map::new(),
            warnings: Vec::new(),
            artifacts: Vec::new(),
            meta: Meta {
                timestamp_utc: humantime::format_rfc3339_seconds(SystemTime::now())
                    .to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }

    /// Echo the effective configuration (after overrides) into the report.
    pub fn set_config<C: Serialize>(&mut self, config: &C) -> Result<()> {
        self.config = serde_json::to_value(config)?;
        Ok(())
    }

    /// Record one named result; insertion order is preserved in the output.
    pub fn push_result<V: Serialize>(&mut self, key: &str, value: V) -> Result<()> {
        self.results
            .insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn push_warning(&mut self, warning: impl Into<String>) {
        self.warnings.push(warning.into());
    }

    /// Record a written artifact. Only the file name is stored: artifacts
    /// always live in the same directory as `report.json`, and recording
    /// names rather than absolute paths keeps reports byte-identical no
    /// matter where the output directory lands.
    pub fn push_artifact(&mut self, path: &Path) {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.artifacts.push(name);
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Write the report atomically.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_json()?)
    }
}

/// Remove the `meta` block from a serialized report, re-serializing the
/// rest canonically. Two deterministic runs agree byte-for-byte on this.
pub fn strip_meta(report_json: &str) -> Result<String> {
    let mut value: Value = serde_json::from_str(report_json)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Validation("report is not a JSON object".into()))?;
    obj.remove("meta");
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}
