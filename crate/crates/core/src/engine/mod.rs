//! Simulation engines for gadget circuits with injected Pauli faults.
//!
//! [`FrameEngine`] tracks only the net Pauli error and is the production
//! path. [`TableauEngine`] carries the full stabilizer state and serves as the
//! differential-testing oracle.

mod frame;
mod tableau;

pub use frame::{frame_run, FrameEngine, PauliFrame};
pub use tableau::{encode_logical_plus, encode_logical_zero, tableau_run, Measurement, Tableau, TableauEngine};

use crate::error::Result;
use crate::gadget::{Gate, GadgetCircuit};
use crate::noise::FaultKind;
use crate::pauli::PauliOperator;

/// Measurement record of one circuit: `(gate index, bit)` in execution order.
/// Bit 0 is the +1 eigenvalue; a flag bit of 1 means the flag fired.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OutcomeRecord {
    pub entries: Vec<(usize, bool)>,
}

impl OutcomeRecord {
    pub fn bits(&self) -> Vec<bool> {
        self.entries.iter().map(|&(_, b)| b).collect()
    }
}

/// The `[s, f]` pair of one gadget; `flag` is `None` for unflagged gadgets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct GadgetOutcome {
    pub syndrome: bool,
    pub flag: Option<bool>,
}

impl GadgetOutcome {
    pub fn is_trivial(&self) -> bool {
        !self.syndrome && !self.flag.unwrap_or(false)
    }

    pub fn flag_fired(&self) -> bool {
        self.flag == Some(true)
    }
}

/// Something that can execute gadgets on a persistent data register.
pub trait Engine {
    /// Runs one gadget; `fault_at(gate_index, gate)` is asked once per gate.
    fn run_gadget<F>(&mut self, c: &GadgetCircuit, fault_at: F) -> Result<GadgetOutcome>
    where
        F: FnMut(usize, &Gate) -> Option<FaultKind>;

    /// Applies a correction to the data qubits.
    fn apply_data_pauli(&mut self, p: &PauliOperator);

    fn num_data_qubits(&self) -> usize;
}
