//! Structured pass/fail records emitted by every verification routine.

use serde::{Deserialize, Serialize};

use crate::tol::Tolerance;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub details: String,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, pass: bool, residual: f64, details: impl Into<String>) -> Self {
        CheckRecord { name: name.into(), pass, residual, details: details.into() }
    }

    /// Pass iff `residual ≤ threshold`.
    pub fn from_residual(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            pass: residual <= threshold,
            residual,
            details: format!("threshold {threshold:.3e}"),
        }
    }
}

/// A bundle of checks; `pass` is their conjunction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub tolerance: Tolerance,
    pub checks: Vec<CheckRecord>,
}

impl ValidationReport {
    pub fn new(tolerance: Tolerance) -> Self {
        ValidationReport { pass: true, tolerance, checks: Vec::new() }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn merge(&mut self, other: ValidationReport) {
        for c in other.checks {
            self.push(c);
        }
    }

    /// First failing check, if any.
    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| !c.pass)
    }
}
