//! Experiment reports: checks that carry their own bounds, fitted
//! exponents, and the JSON summary.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// `lower ≤ value ≤ upper`, with missing bounds unconstrained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn between(name: impl Into<String>, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let pass = !value.is_nan() && lower.map_or(true, |l| value >= l) && upper.map_or(true, |u| value <= u);
        Self { name: name.into(), value, lower, upper, pass }
    }

    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::between(name, value, None, Some(upper))
    }

    pub fn at_least(name: impl Into<String>, value: f64, lower: f64) -> Self {
        Self::between(name, value, Some(lower), None)
    }

    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::between(name, value, Some(target - tolerance), Some(target + tolerance))
    }

    /// A yes/no outcome encoded as 1/0 against the bound 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn recompute(&self) -> bool {
        Self::between(self.name.clone(), self.value, self.lower, self.upper).pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    pub name: String,
    pub exponent: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub fitted: Vec<Fitted>,
    pub pass: bool,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn new(experiment: &str, inputs: Value, checks: Vec<Check>, fitted: Vec<Fitted>, seconds: f64) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { experiment: experiment.into(), inputs, checks, fitted, pass, wall_clock_seconds: seconds }
    }
}
