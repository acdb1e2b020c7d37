//! Machine-readable run reports.
//!
//! A report echoes the configuration, records the seed when one is in play,
//! carries the subcommand's results as structured JSON, and optionally the
//! stage timings. Without timings, reports for the same configuration and
//! seed are byte-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
    #[serde(skip)]
    text: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            tool: "guf".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: BTreeMap::new(),
            seed: None,
            results: serde_json::Value::Null,
            timings_ms: None,
            text: Vec::new(),
        }
    }

    pub fn config_str(&mut self, key: &str, value: String) {
        self.config.insert(key.to_string(), value);
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn results(&mut self, value: serde_json::Value) {
        self.results = value;
    }

    pub fn timings(&mut self, entries: BTreeMap<String, f64>) {
        self.timings_ms = Some(entries);
    }

    pub fn text(&mut self, line: String) {
        self.text.push(line);
    }

    pub fn lines(&self) -> &[String] {
        &self.text
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_round_trip_through_the_schema() {
        let mut r = Report::new("classify");
        r.config_str("formula", "inline:true".to_string());
        r.seed(7);
        r.results(serde_json::json!({"guarded": true}));
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(r, back);
    }
}
