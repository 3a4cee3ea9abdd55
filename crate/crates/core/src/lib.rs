//! Simulator for interferometric apparatuses acting on photon OAM states.
//!
//! The engine types are generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix the common choices.

pub mod builders;
pub mod circuit;
pub mod element;
pub mod measurement;
pub mod netlist;
pub mod oracle;
pub mod qkd;
pub mod scalar;
pub mod sequence;
pub mod state;
pub mod walk;

pub use circuit::{CircuitError, Simulation};
pub use element::Element;
pub use netlist::{emit, parse, NetlistError};
pub use scalar::Real;
pub use sequence::{fibonacci_fraction, SequenceKind, SequenceSpec};
pub use state::{Label, Mode, PathId, Polarization, Slot};

pub type Circuit = circuit::Circuit<f64>;
pub type Circuit32 = circuit::Circuit<f32>;
pub type PureState = state::PureState<f64>;
pub type PureState32 = state::PureState<f32>;
pub type TwoPhotonState = state::TwoPhotonState<f64>;
pub type TwoPhotonState32 = state::TwoPhotonState<f32>;
pub type TransferMatrix = oracle::TransferMatrix<f64>;
pub type TransferMatrix32 = oracle::TransferMatrix<f32>;
/// Exact filter retention fractions.
pub type Fraction = num_rational::Ratio<u64>;
