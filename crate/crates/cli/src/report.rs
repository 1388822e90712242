//! Run reports: what was asked, on which inputs, and what came out.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_file(path: &Path) -> std::io::Result<Self> {
        let bytes = std::fs::read(path)?;
        Ok(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub context: Option<String>,
    pub inputs: Vec<InputDigest>,
    /// Whether the run found everything it checked in order.
    pub passed: bool,
    /// Plain-text verdicts, stable across runs and thread counts.
    pub verdict: String,
    pub witnesses: Vec<String>,
    /// Structured payload of the command.
    pub data: serde_json::Value,
    /// Wall-clock time; the only field allowed to differ between reruns.
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: &[String]) -> Self {
        RunReport {
            tool: "cohact".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.to_vec(),
            context: None,
            inputs: Vec::new(),
            passed: true,
            verdict: String::new(),
            witnesses: Vec::new(),
            data: serde_json::Value::Null,
            timing_ms: None,
        }
    }

    /// The report with the timing field cleared, for comparing reruns.
    pub fn without_timing(&self) -> RunReport {
        RunReport {
            timing_ms: None,
            ..self.clone()
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = self.verdict.clone();
        if !out.is_empty() && !out.ends_with('\n') {
            out.push('\n');
        }
        for w in &self.witnesses {
            out.push_str(&format!("witness: {w}\n"));
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
