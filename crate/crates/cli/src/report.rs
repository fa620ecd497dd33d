//! Machine-readable reports and the exit-code policy.

use serde::Serialize;

/// One named check. `slack` is the margin left under the governing tolerance,
/// so a failed check always carries a negative slack.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub slack: f64,
    /// Failure here means a certified bound was violated (exit 4): on valid
    /// inputs that signals a library bug, not a property of the instance.
    #[serde(skip)]
    pub certified: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, slack: f64) -> Self {
        Check {
            name: name.into(),
            pass: slack >= 0.0,
            slack,
            certified: false,
        }
    }

    pub fn certified(name: impl Into<String>, slack: f64) -> Self {
        Check {
            certified: true,
            ..Check::new(name, slack)
        }
    }

    /// A yes/no check without a numeric margin.
    pub fn boolean(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            slack: if pass { 0.0 } else { -1.0 },
            certified: false,
        }
    }
}

/// One recorded barrier step.
#[derive(Debug, Clone, Serialize)]
pub struct StepJson {
    pub k: usize,
    pub point: Vec<f64>,
    pub barrier_values: Vec<f64>,
    pub above_roots: bool,
}

/// Report envelope shared by every command. The first six fields are always
/// present; the rest appear when the command produces them.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub certified_bound: Option<f64>,
    pub achieved: Vec<f64>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_root: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuous: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepJson>>,
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        Report {
            command: command.into(),
            inputs_digest,
            certified_bound: None,
            achieved: Vec::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            coefficients: None,
            roots: None,
            max_root: None,
            parts: None,
            r_used: None,
            vacuous: None,
            steps: None,
        }
    }
}

/// 0 when every check passes; 4 when a certified bound was violated;
/// 1 for any other failed check.
pub fn exit_code(report: &Report) -> i32 {
    if report.checks.iter().all(|c| c.pass) {
        0
    } else if report.checks.iter().any(|c| c.certified && !c.pass) {
        4
    } else {
        1
    }
}
