//! Structured check results.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Witness lists are truncated to this many entries; counts stay exact.
pub const MAX_WITNESSES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        })
    }
}

/// Outcome of a check or query. Field order is fixed, map keys are sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub status: Status,
    #[serde(default)]
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(default)]
    pub witnesses: Vec<Value>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    /// A passing report with nothing recorded yet.
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            status: Status::Pass,
            counts: BTreeMap::new(),
            values: BTreeMap::new(),
            witnesses: Vec::new(),
            seed: None,
            timing_ms: None,
        }
    }

    pub fn info(name: impl Into<String>) -> Self {
        Report { status: Status::Info, ..Report::new(name) }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn set_count(&mut self, key: &str, n: u64) {
        self.counts.insert(key.to_string(), n);
    }

    pub fn add_count(&mut self, key: &str, n: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += n;
    }

    pub fn set_value(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.values.insert(key.to_string(), v);
    }

    /// Records a witness without changing the status.
    pub fn witness(&mut self, w: impl Serialize) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(serde_json::to_value(w).expect("witnesses serialize"));
        }
    }

    /// Records a witness and marks the report failed.
    pub fn fail(&mut self, w: impl Serialize) {
        self.status = Status::Fail;
        self.witness(w);
    }

    /// Folds a sub-report in: counts are added under `prefix.`, witnesses
    /// are appended, and a failure propagates.
    pub fn absorb(&mut self, prefix: &str, other: &Report) {
        for (k, v) in &other.counts {
            self.add_count(&format!("{prefix}.{k}"), *v);
        }
        for (k, v) in &other.values {
            self.values.insert(format!("{prefix}.{k}"), v.clone());
        }
        for w in &other.witnesses {
            self.witness(serde_json::json!({ prefix: w }));
        }
        if other.status == Status::Fail {
            self.status = Status::Fail;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}
