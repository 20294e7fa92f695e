//! The run report shared by all subcommands.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "toric-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct Resources {
    pub cap: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    /// SHA-256 over the input bytes, or over the generator parameters when
    /// there is no input.
    pub input_digest: String,
    pub parameters: Value,
    pub results: Value,
    pub resources: Resources,
    pub verdict: Option<String>,
    #[serde(skip)]
    pub summary: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for line in &self.summary {
            out.push_str(line);
            out.push('\n');
        }
        if let Some(v) = &self.verdict {
            out.push_str(&format!("verdict: {}\n", v));
        }
        out
    }
}
