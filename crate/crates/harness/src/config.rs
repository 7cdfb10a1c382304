//! Experiment configuration. Precedence, lowest first: built-in defaults,
//! the JSON config file, command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmaplus::property::TestMode;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SseCompleteness,
    SseSoundness,
    UgCompleteness,
    CspCompleteness,
    SearchAdversary,
    VerifyBounds,
    VerifyGapMax,
    AuditProductTest,
    PcpIndex,
    PcpVerify,
    PcpAudit,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::SseCompleteness,
        Experiment::SseSoundness,
        Experiment::UgCompleteness,
        Experiment::CspCompleteness,
        Experiment::SearchAdversary,
        Experiment::VerifyBounds,
        Experiment::VerifyGapMax,
        Experiment::AuditProductTest,
        Experiment::PcpIndex,
        Experiment::PcpVerify,
        Experiment::PcpAudit,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| HarnessError::UnknownExperiment(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProverMode {
    #[default]
    Honest,
    Adversarial { restarts: usize },
    /// Proof families read from a JSON file with keys `psi` and `phi`.
    Fixture { path: PathBuf },
}

/// Parameter overrides; unset fields take the experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

/// Names accepted by [`Overrides::set`], in column order for sweeps.
pub const PARAMETERS: [&str; 11] = ["eps", "k", "delta", "eta", "q", "theta", "nu", "trials", "n", "d", "samples"];

impl Overrides {
    /// Fields set in `other` win.
    pub fn merge(&mut self, other: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => {$(if other.$f.is_some() { self.$f = other.$f.clone(); })*};
        }
        take!(eps, k, delta, eta, q, theta, nu, trials, n, d, samples, dims);
    }

    /// Sets a scalar parameter by name; integer parameters must be whole.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let whole = || {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(HarnessError::Config(format!("{name} must be a non-negative integer, got {value}")))
            }
        };
        match name {
            "eps" => self.eps = Some(value),
            "delta" => self.delta = Some(value),
            "eta" => self.eta = Some(value),
            "theta" => self.theta = Some(value),
            "nu" => self.nu = Some(value),
            "k" => self.k = Some(whole()?),
            "q" => self.q = Some(whole()?),
            "trials" => self.trials = Some(whole()?),
            "n" => self.n = Some(whole()?),
            "d" => self.d = Some(whole()?),
            "samples" => self.samples = Some(whole()?),
            _ => return Err(HarnessError::Config(format!("unknown parameter `{name}`"))),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub experiment: Experiment,
    #[serde(default)]
    pub prover: ProverMode,
    #[serde(default = "exact")]
    pub mode: TestMode,
    #[serde(default)]
    pub seed: u64,
    /// Forces the brute-force cross-check where one exists.
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub params: Overrides,
}

fn exact() -> TestMode {
    TestMode::Exact
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            id: experiment.name(),
            experiment,
            prover: ProverMode::Honest,
            mode: TestMode::Exact,
            seed: 0,
            oracle: false,
            params: Overrides::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Monte Carlo trials when sampling, `None` in exact mode.
    pub fn trials(&self) -> Option<usize> {
        match self.mode {
            TestMode::Exact => None,
            TestMode::MonteCarlo { trials, .. } => Some(trials),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("run-everything".parse::<Experiment>(), Err(HarnessError::UnknownExperiment(_))));
    }

    #[test]
    fn later_overrides_win() {
        let mut base = Overrides { eta: Some(0.1), n: Some(16), ..Default::default() };
        base.merge(&Overrides { eta: Some(0.05), ..Default::default() });
        assert_eq!((base.eta, base.n), (Some(0.05), Some(16)));
        assert!(base.set("k", 2.5).is_err());
        assert!(base.set("gamma", 1.0).is_err());
    }

    #[test]
    fn minimal_file() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"id": "x", "experiment": "verify-gap-max"}"#).unwrap();
        assert_eq!(c.mode, TestMode::Exact);
        assert_eq!(c.prover, ProverMode::Honest);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"id": "x", "experiment": "nope"}"#).is_err());
    }
}
