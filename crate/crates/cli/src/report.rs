//! The report written by every command, and the exit-code contract.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::files::FileError;

/// Exit codes: every check passed, a check failed, the invocation was
/// unusable or infeasible, or a budget ran out before a decision.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn from_option(ok: Option<bool>) -> Self {
        ok.map_or(Status::Inconclusive, Status::from_bool)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

impl InputRecord {
    pub fn hash(path: &Path) -> Result<Self, FileError> {
        let bytes = std::fs::read(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(InputRecord {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

/// Deterministic given the inputs and seed; timings are only recorded when
/// requested, since they differ between runs.
#[derive(Clone, Debug, Serialize)]
pub struct ReportFile {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub witnesses: Vec<Value>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl ReportFile {
    pub fn new(command: &str) -> Self {
        ReportFile {
            command: command.to_string(),
            inputs: Vec::new(),
            seed: None,
            parameters: BTreeMap::new(),
            status: Status::Pass,
            checks: Vec::new(),
            witnesses: Vec::new(),
            result: Value::Null,
            timings_ms: None,
        }
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) {
        self.parameters.insert(
            name.to_string(),
            serde_json::to_value(value).expect("serializable"),
        );
    }

    pub fn check(&mut self, name: &str, status: Status, detail: impl Serialize) {
        let detail = serde_json::to_value(detail).expect("serializable");
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status,
            detail,
        });
    }

    pub fn witness(&mut self, w: impl Serialize) {
        self.witnesses
            .push(serde_json::to_value(w).expect("serializable"));
    }

    /// Fail beats inconclusive beats pass.
    pub fn finish(&mut self) {
        self.status = if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        };
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => EXIT_PASS,
            Status::Fail => EXIT_FAIL,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}
