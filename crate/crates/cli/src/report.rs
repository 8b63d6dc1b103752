//! The one output shape every subcommand emits. Field order is fixed by the
//! struct, maps are sorted, and only `timing_ms` varies between identical
//! runs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub command: String,
    pub args: BTreeMap<String, String>,
    pub input_digest: String,
    /// Canonical echo of the parsed instance; verification reruns from this.
    pub instance: serde_json::Value,
    pub verdict: String,
    /// What the verdict covers: exact, exhaustive, or bounded how.
    pub scope: String,
    pub witness: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub timing_ms: u128,
}

pub fn tool_version() -> String {
    format!("paradesk {}", env!("CARGO_PKG_VERSION"))
}

pub fn digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("sha256:{:x}", hasher.finalize())
}
