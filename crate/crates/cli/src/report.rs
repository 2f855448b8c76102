//! The versioned report envelope shared by every command.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// `inputs` holds the canonical documents the command ran on, so a report
/// can be replayed without the original files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs_digest: String,
    pub inputs: Value,
    pub results: Value,
    pub timing_ms: u64,
}

/// `sha256:` and the hex digest of the compact JSON of `inputs` (keys sorted).
pub fn digest(inputs: &Value) -> String {
    let text = serde_json::to_string(inputs).expect("JSON values serialize");
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Value, started: Instant) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs_digest: digest(&inputs),
            inputs,
            results,
            timing_ms: started.elapsed().as_millis() as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// A finished command: the report and its text rendering.
#[derive(Clone, Debug)]
pub struct Output {
    pub report: Report,
    pub text: String,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.text.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"b": 1, "a": [1, 2]}"#).unwrap();
        let b = json!({"a": [1, 2], "b": 1});
        assert_eq!(digest(&a), digest(&b));
        assert_ne!(digest(&a), digest(&json!({"a": [2, 1], "b": 1})));
        assert!(digest(&a).starts_with("sha256:"));
        assert_eq!(digest(&a).len(), 7 + 64);
    }
}
