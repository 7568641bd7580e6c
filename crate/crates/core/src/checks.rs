use serde::{Deserialize, Serialize};

/// Outcome of one quantitative property check: the worst observed value of a
/// statistic against the bound it must stay under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub bound: f64,
    pub detail: String,
}

impl PropertyCheck {
    /// Passes when `worst <= bound`.
    pub fn at_most(name: impl Into<String>, worst: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: worst <= bound,
            worst,
            bound,
            detail: detail.into(),
        }
    }

    /// Passes when `value > bound`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value > bound,
            worst: value,
            bound,
            detail: detail.into(),
        }
    }
}

pub fn all_passed(checks: &[PropertyCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}
