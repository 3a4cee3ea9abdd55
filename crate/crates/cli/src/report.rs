use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Machine-readable record of one command run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: Vec<String>,
    pub config: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
    pub wall_time_s: f64,
}

/// Comparison of a result against an independent computation.
#[derive(Debug, Clone, Serialize)]
pub struct Oracle {
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<OracleCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub deviation: f64,
}

impl Oracle {
    pub fn new(checks: Vec<OracleCheck>, tolerance: f64) -> Self {
        let max_deviation = checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
        Self { max_deviation, tolerance, passed: max_deviation <= tolerance, checks }
    }
}

pub fn check(name: impl Into<String>, deviation: f64) -> OracleCheck {
    OracleCheck { name: name.into(), deviation }
}
