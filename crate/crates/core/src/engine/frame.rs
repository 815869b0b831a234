//! Pauli-frame propagation through gadget circuits.

use crate::error::Result;
use crate::gadget::{Gate, GadgetCircuit};
use crate::noise::{FaultEvent, FaultKind};
use crate::pauli::{Letter, Phase, PauliOperator};

use super::{Engine, GadgetOutcome, OutcomeRecord};

/// Net Pauli error relative to the ideal run, phase dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliFrame {
    num_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliFrame {
    pub fn new(num_qubits: usize) -> Self {
        assert!(num_qubits <= 64);
        PauliFrame { num_qubits, x: 0, z: 0 }
    }

    pub fn from_pauli(p: &PauliOperator) -> Self {
        PauliFrame { num_qubits: p.num_qubits(), x: p.x_bits(), z: p.z_bits() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Frame restricted to the first `n` qubits.
    pub fn restrict(&self, n: usize) -> PauliOperator {
        PauliOperator::from_bits(n, self.x, self.z, Phase::PLUS_ONE)
    }

    pub fn as_pauli(&self) -> PauliOperator {
        self.restrict(self.num_qubits)
    }

    /// Multiplies in a Pauli on the leading qubits.
    pub fn apply(&mut self, p: &PauliOperator) {
        self.x ^= p.x_bits();
        self.z ^= p.z_bits();
    }

    #[inline]
    fn xor_letter(&mut self, q: usize, letter: Letter) {
        let (lx, lz) = letter.bits();
        self.x ^= (lx as u64) << q;
        self.z ^= (lz as u64) << q;
    }

    #[inline]
    fn clear(&mut self, q: usize) {
        self.x &= !(1 << q);
        self.z &= !(1 << q);
    }

    fn ensure(&mut self, n: usize) {
        self.num_qubits = self.num_qubits.max(n);
    }

    /// Conjugates the frame through one gate and applies any fault attached
    /// to it. Returns the recorded bit for measurements.
    #[inline]
    pub(crate) fn step(&mut self, gate: &Gate, fault: Option<FaultKind>) -> Option<bool> {
        match *gate {
            Gate::PrepPlus(q) => {
                self.clear(q);
                if fault == Some(FaultKind::PrepFlip) {
                    self.z |= 1 << q;
                }
                None
            }
            Gate::PrepZero(q) => {
                self.clear(q);
                if fault == Some(FaultKind::PrepFlip) {
                    self.x |= 1 << q;
                }
                None
            }
            Gate::ControlledPauli { control, target, letter } => {
                let (lx, lz) = letter.bits();
                let tx = (self.x >> target) & 1 == 1;
                let tz = (self.z >> target) & 1 == 1;
                // X on the control picks up the controlled letter on the target;
                // a target letter anticommuting with it kicks back Z on the control.
                if (self.x >> control) & 1 == 1 {
                    self.xor_letter(target, letter);
                }
                if (tx & lz) ^ (tz & lx) {
                    self.z ^= 1 << control;
                }
                if let Some(FaultKind::TwoQubit(a, b)) = fault {
                    self.xor_letter(control, a);
                    self.xor_letter(target, b);
                }
                None
            }
            Gate::Cx { control, target } => {
                self.x ^= ((self.x >> control) & 1) << target;
                self.z ^= ((self.z >> target) & 1) << control;
                if let Some(FaultKind::TwoQubit(a, b)) = fault {
                    self.xor_letter(control, a);
                    self.xor_letter(target, b);
                }
                None
            }
            Gate::MeasureX(q) => {
                let bit = (self.z >> q) & 1 == 1;
                self.clear(q);
                Some(bit ^ (fault == Some(FaultKind::MeasureFlip)))
            }
            Gate::MeasureZ(q) => {
                let bit = (self.x >> q) & 1 == 1;
                self.clear(q);
                Some(bit ^ (fault == Some(FaultKind::MeasureFlip)))
            }
        }
    }

    /// Runs a gadget, pulling faults gate by gate from `fault_at`.
    #[inline]
    pub(crate) fn run_with<F>(&mut self, c: &GadgetCircuit, mut fault_at: F) -> GadgetOutcome
    where
        F: FnMut(usize, &Gate) -> Option<FaultKind>,
    {
        self.ensure(c.num_qubits());
        let mut out = GadgetOutcome::default();
        let syndrome = c.syndrome_qubit();
        for (i, g) in c.gates().iter().enumerate() {
            if let Some(bit) = self.step(g, fault_at(i, g)) {
                match *g {
                    Gate::MeasureX(q) | Gate::MeasureZ(q) if q == syndrome => out.syndrome = bit,
                    _ => out.flag = Some(bit),
                }
            }
        }
        out
    }
}

fn fault_lookup(faults: &[FaultEvent]) -> impl FnMut(usize, &Gate) -> Option<FaultKind> + '_ {
    move |i, _| faults.iter().find(|f| f.location == i).map(|f| f.kind)
}

/// Propagates `frame` through `c` with the given faults applied right after
/// their gates. Measurement bits are the frame's anticommutation with the
/// measured observable, XOR any flip fault.
pub fn frame_run(c: &GadgetCircuit, frame: PauliFrame, faults: &[FaultEvent]) -> Result<(OutcomeRecord, PauliFrame)> {
    for f in faults {
        f.validate(c)?;
    }
    let mut frame = frame;
    frame.ensure(c.num_qubits());
    let mut record = OutcomeRecord::default();
    for (i, g) in c.gates().iter().enumerate() {
        // Several faults may share a location only in multi-fault injections;
        // fold them into one combined two-qubit Pauli.
        let here: Vec<FaultKind> = faults.iter().filter(|f| f.location == i).map(|f| f.kind).collect();
        let bit = match here.as_slice() {
            [] => frame.step(g, None),
            [single] => frame.step(g, Some(*single)),
            many => {
                let bit = frame.step(g, None);
                let mut flip = false;
                for kind in many {
                    match (*kind, *g) {
                        (FaultKind::TwoQubit(a, b), _) => {
                            let ops = g.operands();
                            frame.xor_letter(ops[0], a);
                            frame.xor_letter(ops[1], b);
                        }
                        (FaultKind::PrepFlip, Gate::PrepPlus(q)) => frame.z ^= 1 << q,
                        (FaultKind::PrepFlip, Gate::PrepZero(q)) => frame.x ^= 1 << q,
                        (FaultKind::MeasureFlip, _) => flip ^= true,
                        _ => {}
                    }
                }
                bit.map(|b| b ^ flip)
            }
        };
        if let Some(b) = bit {
            record.entries.push((i, b));
        }
    }
    Ok((record, frame))
}

/// Frame-based engine for protocol execution: data errors persist, ancillas
/// are reset by every preparation.
#[derive(Debug, Clone)]
pub struct FrameEngine {
    frame: PauliFrame,
    num_data: usize,
}

impl FrameEngine {
    pub fn new(num_data: usize) -> Self {
        FrameEngine { frame: PauliFrame::new(num_data + 2), num_data }
    }

    pub fn with_data_error(e: &PauliOperator) -> Self {
        let mut engine = Self::new(e.num_qubits());
        engine.frame.apply(e);
        engine
    }

    pub fn data_error(&self) -> PauliOperator {
        self.frame.restrict(self.num_data)
    }
}

impl Engine for FrameEngine {
    #[inline]
    fn run_gadget<F>(&mut self, c: &GadgetCircuit, fault_at: F) -> Result<GadgetOutcome>
    where
        F: FnMut(usize, &Gate) -> Option<FaultKind>,
    {
        Ok(self.frame.run_with(c, fault_at))
    }

    fn apply_data_pauli(&mut self, p: &PauliOperator) {
        self.frame.apply(p);
    }

    fn num_data_qubits(&self) -> usize {
        self.num_data
    }
}

impl FrameEngine {
    /// Runs `c` with an explicit fault list.
    pub fn run_gadget_with_faults(&mut self, c: &GadgetCircuit, faults: &[FaultEvent]) -> Result<GadgetOutcome> {
        for f in faults {
            f.validate(c)?;
        }
        Ok(self.frame.run_with(c, fault_lookup(faults)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{build_flagged_gadget, build_unflagged_gadget};
    use crate::pauli::pauli;

    fn two(location: usize, a: Letter, b: Letter) -> FaultEvent {
        FaultEvent { location, kind: FaultKind::TwoQubit(a, b) }
    }

    #[test]
    fn fault_free_gadget_leaves_identity() {
        let g = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        let (rec, frame) = frame_run(&g, PauliFrame::new(7), &[]).unwrap();
        assert_eq!(rec.bits(), vec![false, false]);
        assert!(frame.is_identity());
    }

    #[test]
    fn hook_after_second_data_gate() {
        let g = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        // Gate 4 is the controlled-Z onto qubit 2.
        let (rec, frame) = frame_run(&g, PauliFrame::new(7), &[two(4, Letter::X, Letter::I)]).unwrap();
        assert_eq!(rec.bits(), vec![false, true]);
        assert_eq!(frame.restrict(5), pauli("IIZXI"));
        let (rec, frame) = frame_run(&g, PauliFrame::new(7), &[two(4, Letter::X, Letter::X)]).unwrap();
        assert_eq!(rec.bits(), vec![false, true]);
        assert_eq!(frame.restrict(5), pauli("IXZXI"));
    }

    #[test]
    fn pre_existing_data_error_flips_syndrome() {
        let g = build_unflagged_gadget(&pauli("IXZZX"), 5).unwrap();
        let start = PauliFrame::from_pauli(&pauli("IIIIZII"));
        let (rec, frame) = frame_run(&g, start, &[]).unwrap();
        assert_eq!(rec.bits(), vec![true]);
        assert_eq!(frame.restrict(5), pauli("IIIIZ"));
    }

    #[test]
    fn flips_are_applied() {
        let g = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        let prep_flag = FaultEvent { location: 1, kind: FaultKind::PrepFlip };
        let (rec, _) = frame_run(&g, PauliFrame::new(7), &[prep_flag]).unwrap();
        assert_eq!(rec.bits(), vec![false, true]);
        let prep_syn = FaultEvent { location: 0, kind: FaultKind::PrepFlip };
        let (rec, _) = frame_run(&g, PauliFrame::new(7), &[prep_syn]).unwrap();
        assert_eq!(rec.bits(), vec![true, false]);
        let meas = FaultEvent { location: 8, kind: FaultKind::MeasureFlip };
        let (rec, frame) = frame_run(&g, PauliFrame::new(7), &[meas]).unwrap();
        assert_eq!(rec.bits(), vec![true, false]);
        assert!(frame.is_identity());
    }

    #[test]
    fn invalid_location_rejected() {
        let g = build_unflagged_gadget(&pauli("XZZXI"), 5).unwrap();
        assert!(frame_run(&g, PauliFrame::new(7), &[two(0, Letter::X, Letter::X)]).is_err());
    }
}
