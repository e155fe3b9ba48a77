//! Resolved run configuration echoed into every artifact.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub rng: &'static str,
    /// Every argument after defaults are applied.
    pub params: Value,
}

impl RunConfig {
    pub fn new(command: &str, params: &impl Serialize) -> Self {
        RunConfig {
            tool: "bitsig",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            rng: bitsig::rng::RNG_ALGORITHM,
            params: serde_json::to_value(params).expect("arguments serialize"),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, as lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `# `-prefixed header lines for text artifacts.
    pub fn comment_header(&self) -> String {
        format!("# config_hash={}\n# run_config={}\n", self.hash(), self.to_json())
    }

    /// JSON artifact with the config and its hash next to the payload.
    pub fn envelope(&self, key: &str, payload: Value) -> Value {
        json!({ "run_config": self, "config_hash": self.hash(), key: payload })
    }
}
