//! Suite results.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::gen::GenConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Oracle,
    Confluence,
    Invariants,
    Simulation,
    Termination,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Confluence => "confluence",
            Suite::Invariants => "invariants",
            Suite::Simulation => "simulation",
            Suite::Termination => "termination",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "oracle" => Suite::Oracle,
            "confluence" => Suite::Confluence,
            "invariants" => Suite::Invariants,
            "simulation" => Suite::Simulation,
            "termination" => Suite::Termination,
            other => {
                return Err(Error::Parse {
                    offset: 0,
                    message: format!("unknown suite {other:?}"),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail {
        reason: String,
    },
    /// The step fuse stopped the run. Reported apart from failures.
    FuseTripped {
        steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: u64,
    pub outcome: Outcome,
    pub deviation: f64,
    pub steps: usize,
    pub generators: usize,
}

impl TrialReport {
    pub fn pass(trial: u64, deviation: f64, steps: usize, generators: usize) -> Self {
        TrialReport {
            trial,
            outcome: Outcome::Pass,
            deviation,
            steps,
            generators,
        }
    }

    pub fn fail(trial: u64, reason: impl Into<String>) -> Self {
        TrialReport {
            trial,
            outcome: Outcome::Fail {
                reason: reason.into(),
            },
            deviation: 0.0,
            steps: 0,
            generators: 0,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self.outcome, Outcome::Fail { .. })
    }
}

/// Trials in index order. A failing trial is replayed from the config and its
/// index alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: GenConfig,
    pub trials: Vec<TrialReport>,
    pub passed: usize,
    pub failed: usize,
    pub fuse_trips: usize,
    pub max_deviation: f64,
}

impl SuiteReport {
    pub fn new(suite: Suite, config: GenConfig, trials: Vec<TrialReport>) -> Self {
        let count = |f: fn(&Outcome) -> bool| trials.iter().filter(|t| f(&t.outcome)).count();
        SuiteReport {
            suite,
            passed: count(|o| matches!(o, Outcome::Pass)),
            failed: count(|o| matches!(o, Outcome::Fail { .. })),
            fuse_trips: count(|o| matches!(o, Outcome::FuseTripped { .. })),
            max_deviation: trials.iter().map(|t| t.deviation).fold(0.0, f64::max),
            config,
            trials,
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialReport> {
        self.trials.iter().filter(|t| t.is_failure())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Plain-text summary: one header line, one line per failure.
impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} trials {:>5}  pass {:>5}  fail {:>5}  fuse {:>5}  max dev {:.3e}  seed {}",
            self.suite.name(),
            self.trials.len(),
            self.passed,
            self.failed,
            self.fuse_trips,
            self.max_deviation,
            self.config.seed
        )?;
        for t in self.failures() {
            if let Outcome::Fail { reason } = &t.outcome {
                writeln!(f, "  trial {}: {reason}", t.trial)?;
            }
        }
        Ok(())
    }
}
