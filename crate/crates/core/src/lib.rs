//! Flag-style fault-tolerant syndrome extraction for the [[5,1,3]] and
//! [[7,1,3]] Steane codes.
//!
//! The crate builds the measurement gadgets and adaptive protocols, simulates
//! them with a Pauli-frame engine (checked against a stabilizer tableau),
//! derives and certifies lookup tables by exhaustive single-fault injection,
//! and runs Monte Carlo pseudothreshold sweeps.

pub mod code;
pub mod engine;
pub mod error;
pub mod gadget;
pub mod noise;
pub mod pauli;
pub mod protocol;
pub mod synthesis;
pub mod threshold;

pub use code::{code_513, code_steane, ResidualClass, StabilizerCode};
pub use error::{Error, Result};
pub use pauli::{pauli, Letter, PauliOperator, Phase, Sign};
