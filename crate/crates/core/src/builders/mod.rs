//! Constructors for the detection, analysis and state-preparation
//! apparatus, plus oracle-based self-checks for each.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::CircuitError;
use crate::sequence::SequenceError;

mod polarization;
mod rsg;
mod sgdt;
mod tree;
mod mub;
pub mod verify;

pub use mub::build_mub4;
pub use polarization::{build_polarization_analyzer, build_polarization_pair};
pub use rsg::{build_rsg, build_rsg_cell, rsg_output_port};
pub use sgdt::{build_sgdt, build_synthesizer, SYNTH_DIFFERENCE, SYNTH_OUTPUT};
pub use tree::{build_cd_tree, build_jump_tree, build_tribonacci_tree, Parity};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("need at least {needed} sequence values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("all target coefficients are zero")]
    ZeroTarget,
    #[error("values must be distinct")]
    DuplicateValues,
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("recurrence needs gain {gain} at cell {cell}; only attenuation is available")]
    GainRequired { cell: usize, gain: f64 },
    #[error("unsupported recurrence: {0}")]
    Unsupported(String),
    #[error("self-check `{check}` failed: deviation {deviation:e}")]
    Verification { check: String, deviation: f64 },
}

/// Coefficients `a_j` paired with OAM values `x_j`, describing the
/// superposition `Σ_j a_j |x_j⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionTarget {
    pub coefficients: Vec<Complex64>,
    pub values: Vec<i64>,
    /// Recurrence index the values hang off (`x_{m−1}, x_{m−2}, ...`).
    #[serde(default)]
    pub anchor: i64,
}

impl SuperpositionTarget {
    pub fn new(coefficients: Vec<Complex64>, values: Vec<i64>) -> Self {
        Self { coefficients, values, anchor: 0 }
    }

    pub fn real(coefficients: &[f64], values: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&a| Complex64::new(a, 0.0)).collect(), values.to_vec())
    }

    pub fn with_anchor(mut self, anchor: i64) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        if self.coefficients.is_empty() {
            return Err(BuildError::InvalidTarget("no coefficients".into()));
        }
        if self.coefficients.len() != self.values.len() {
            return Err(BuildError::InvalidTarget(format!(
                "{} coefficients for {} values",
                self.coefficients.len(),
                self.values.len()
            )));
        }
        if self.coefficients.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(BuildError::InvalidTarget("non-finite coefficient".into()));
        }
        let mut v = self.values.clone();
        v.sort_unstable();
        v.dedup();
        if v.len() != self.values.len() {
            return Err(BuildError::DuplicateValues);
        }
        if self.coefficients.iter().all(|a| a.norm() == 0.0) {
            return Err(BuildError::ZeroTarget);
        }
        Ok(())
    }

    /// Largest `|a_j|`.
    pub fn max_magnitude(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}
