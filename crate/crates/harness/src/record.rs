//! Result records and their on-disk layout `<root>/<id>/<unix-ms>.json`.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qmaplus::protocols::Subtest;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Environment variable naming the results root.
pub const RESULTS_ENV: &str = "QMAPLUS_RESULTS";

/// JSON schema every record validates against.
pub const SCHEMA: &str = include_str!("../schema/result_record.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Holds,
}

/// One asserted invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), relation: Relation::AtMost, value, bound, holds: value <= bound }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), relation: Relation::AtLeast, value, bound, holds: value >= bound }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), relation: Relation::Holds, value: ok as u8 as f64, bound: 1.0, holds: ok }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub ascent: f64,
    pub oracle: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config: ExperimentConfig,
    /// Every parameter the run used, defaults included.
    pub resolved: Value,
    pub subtests: Vec<Subtest>,
    pub overall: Option<f64>,
    pub checks: Vec<Check>,
    pub oracle: Option<OracleCheck>,
    pub data: Value,
    pub wall_time_ms: u64,
}

impl ResultRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }

    /// Writes the record under `root` and returns the file path.
    pub fn write(&self, root: &Path) -> Result<PathBuf> {
        let dir = root.join(&self.config.id);
        std::fs::create_dir_all(&dir)?;
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        let mut path = dir.join(format!("{stamp}.json"));
        let mut bump = 1;
        while path.exists() {
            path = dir.join(format!("{stamp}-{bump}.json"));
            bump += 1;
        }
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}

pub fn results_root() -> PathBuf {
    std::env::var_os(RESULTS_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}
