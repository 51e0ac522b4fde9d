use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub degenerate_tight: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub instance_digest: String,
    pub checks: Vec<CheckResult>,
    pub counts: Counts,
    pub worst_margin: Option<f64>,
    /// Only present with `--timing`, so default output stays byte-stable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, instance_digest: String) -> Self {
        Self {
            command: command.to_string(),
            instance_digest,
            checks: Vec::new(),
            counts: Counts::default(),
            worst_margin: None,
            wall_time_ms: None,
        }
    }

    pub fn push(&mut self, name: &str, passed: bool, detail: impl Serialize) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail: serde_json::to_value(detail).expect("report details serialize"),
        });
    }

    /// Fill `counts` from the checks (used by single-instance commands).
    pub fn count_checks(&mut self) {
        let fail = self.checks.iter().filter(|c| !c.passed).count();
        self.counts.pass = self.checks.len() - fail;
        self.counts.fail = fail;
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.counts.fail == 0
    }

    pub fn note_margin(&mut self, margin: f64) {
        if margin.is_nan() {
            return;
        }
        self.worst_margin = Some(self.worst_margin.map_or(margin, |m| m.min(margin)));
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
