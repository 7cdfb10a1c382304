//! The three verification protocols and their shared outcome record.

pub mod csp;
pub mod sse;
pub mod ug;

use serde::{Deserialize, Serialize};

use crate::property::TestMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subtest {
    pub name: String,
    pub weight: f64,
    pub acceptance: f64,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub protocol: String,
    pub mode: TestMode,
    pub subtests: Vec<Subtest>,
    pub overall: f64,
}

impl ProtocolOutcome {
    /// Uniform mixture over the menu; rounding drift is clamped to `[0, 1]`.
    pub fn from_menu(protocol: &str, mode: TestMode, entries: Vec<(&str, f64, serde_json::Value)>) -> Self {
        let w = 1.0 / entries.len() as f64;
        let subtests: Vec<Subtest> = entries
            .into_iter()
            .map(|(name, acceptance, detail)| Subtest { name: name.to_string(), weight: w, acceptance: acceptance.clamp(0.0, 1.0), detail })
            .collect();
        let overall = subtests.iter().map(|s| s.weight * s.acceptance).sum::<f64>().min(1.0);
        Self { protocol: protocol.to_string(), mode, subtests, overall }
    }

    pub fn subtest(&self, name: &str) -> Option<&Subtest> {
        self.subtests.iter().find(|s| s.name == name)
    }
}

pub(crate) fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}
