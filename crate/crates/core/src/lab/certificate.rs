use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub label: String,
    pub q: u64,
    pub disc: i64,
    /// `(a, b, c)` of the modulus `Z·a + Z·(b + cω)`.
    pub modulus: (i64, i64, i64),
    pub lambda: String,
    pub gamma: String,
    pub flavor: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub checks: Vec<Check>,
    pub group_order: usize,
    pub set_size: usize,
    pub runtime_ms: u64,
    pub seed: u64,
    pub pass: bool,
}

impl Certificate {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Certificate {
            schema_version: crate::SCHEMA_VERSION,
            scenario,
            checks: Vec::new(),
            group_order: 0,
            set_size: 0,
            runtime_ms: 0,
            seed,
            pass: false,
        }
    }

    pub fn record(&mut self, name: &str, outcome: std::result::Result<(), String>) {
        let (ok, counterexample) = match outcome {
            Ok(()) => (true, None),
            Err(c) => (false, Some(c)),
        };
        self.checks.push(Check { name: name.into(), ok, counterexample });
    }

    /// Runs a check that may itself fail with an error; errors count as failures.
    pub fn record_with(&mut self, name: &str, f: impl FnOnce() -> Result<std::result::Result<(), String>>) {
        let outcome = match f() {
            Ok(o) => o,
            Err(e) => Err(format!("error: {e}")),
        };
        self.record(name, outcome);
    }

    /// `pass` as implied by the recorded checks and cardinalities.
    pub fn verdict(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.ok) && self.group_order == self.set_size
    }

    pub fn finish(&mut self, started: std::time::Instant) {
        self.runtime_ms = started.elapsed().as_millis() as u64;
        self.pass = self.verdict();
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    /// Parses a serialized certificate and confirms its `pass` flag is consistent.
    pub fn reverify(doc: &str) -> Result<Certificate> {
        let c: Certificate = serde_json::from_str(doc).map_err(|e| Error::Parse(e.to_string()))?;
        if c.schema_version != crate::SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "schema version {} (expected {})",
                c.schema_version,
                crate::SCHEMA_VERSION
            )));
        }
        if c.pass != c.verdict() {
            return Err(Error::Consistency("pass flag disagrees with the recorded checks".into()));
        }
        Ok(c)
    }
}
