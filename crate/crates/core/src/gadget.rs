//! Stabilizer-measurement gadgets as explicit gate lists.
//!
//! Data qubits are `0..n`. The syndrome ancilla starts in `|+>`, controls one
//! controlled-Pauli per support qubit (ascending), and is read out in the X
//! basis. A flagged gadget adds a `|0>` flag coupled by `CX(syndrome, flag)`
//! twice and read out in the Z basis, so an X fault on the syndrome between
//! the two couplings flips the flag.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::pauli::{Letter, Phase, PauliOperator};

pub type QubitId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    PrepPlus(QubitId),
    PrepZero(QubitId),
    /// Applies `letter` to `target` when `control` is `|1>`.
    ControlledPauli { control: QubitId, target: QubitId, letter: Letter },
    Cx { control: QubitId, target: QubitId },
    MeasureX(QubitId),
    MeasureZ(QubitId),
}

impl Gate {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::ControlledPauli { .. } | Gate::Cx { .. })
    }

    pub fn is_prep(&self) -> bool {
        matches!(self, Gate::PrepPlus(_) | Gate::PrepZero(_))
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::MeasureX(_) | Gate::MeasureZ(_))
    }

    /// Operands, control first for two-qubit gates.
    pub fn operands(&self) -> Vec<QubitId> {
        match *self {
            Gate::PrepPlus(q) | Gate::PrepZero(q) | Gate::MeasureX(q) | Gate::MeasureZ(q) => vec![q],
            Gate::ControlledPauli { control, target, .. } | Gate::Cx { control, target } => {
                vec![control, target]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Data,
    Syndrome,
    Flag,
}

/// Where the two flag couplings sit among the data gates: the first right
/// after data gate `open_after`, the second right before data gate
/// `close_before` (both zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlagPlacement {
    pub open_after: usize,
    pub close_before: usize,
}

impl FlagPlacement {
    /// After the first and before the last data gate.
    pub fn standard(weight: usize) -> Self {
        FlagPlacement { open_after: 0, close_before: weight - 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetCircuit {
    gates: Vec<Gate>,
    roles: BTreeMap<QubitId, Role>,
    measured_stabilizer: PauliOperator,
    syndrome_qubit: QubitId,
    flag_qubit: Option<QubitId>,
    placement: Option<FlagPlacement>,
}

fn check_stabilizer(s: &PauliOperator, syndrome_qubit: QubitId) -> Result<()> {
    if s.is_identity() {
        return Err(Error::InvalidStabilizer("zero-weight stabilizer".into()));
    }
    if !s.phase().is_real() {
        return Err(Error::InvalidStabilizer(format!("{s} is not hermitian")));
    }
    if syndrome_qubit < s.num_qubits() {
        return Err(Error::InvalidStabilizer(format!("ancilla {syndrome_qubit} overlaps the data register")));
    }
    Ok(())
}

fn data_gate(s: &PauliOperator, syndrome: QubitId, q: usize) -> Gate {
    Gate::ControlledPauli { control: syndrome, target: q, letter: s.letter(q) }
}

fn data_roles(s: &PauliOperator) -> BTreeMap<QubitId, Role> {
    (0..s.num_qubits()).map(|q| (q, Role::Data)).collect()
}

/// Plain syndrome extraction for `s`.
pub fn build_unflagged_gadget(s: &PauliOperator, syndrome_qubit: QubitId) -> Result<GadgetCircuit> {
    check_stabilizer(s, syndrome_qubit)?;
    let mut gates = vec![Gate::PrepPlus(syndrome_qubit)];
    gates.extend(s.support().into_iter().map(|q| data_gate(s, syndrome_qubit, q)));
    gates.push(Gate::MeasureX(syndrome_qubit));
    let mut roles = data_roles(s);
    roles.insert(syndrome_qubit, Role::Syndrome);
    Ok(GadgetCircuit {
        gates,
        roles,
        measured_stabilizer: *s,
        syndrome_qubit,
        flag_qubit: None,
        placement: None,
    })
}

/// Flagged extraction with the standard coupling placement.
pub fn build_flagged_gadget(s: &PauliOperator, syndrome_qubit: QubitId, flag_qubit: QubitId) -> Result<GadgetCircuit> {
    if s.weight() < 3 {
        return Err(Error::InvalidStabilizer(format!("flagged gadget needs weight >= 3, got {}", s.weight())));
    }
    build_flagged_gadget_with(s, syndrome_qubit, flag_qubit, FlagPlacement::standard(s.weight()))
}

pub fn build_flagged_gadget_with(
    s: &PauliOperator,
    syndrome_qubit: QubitId,
    flag_qubit: QubitId,
    placement: FlagPlacement,
) -> Result<GadgetCircuit> {
    check_stabilizer(s, syndrome_qubit)?;
    let w = s.weight();
    if w < 3 {
        return Err(Error::InvalidStabilizer(format!("flagged gadget needs weight >= 3, got {w}")));
    }
    if flag_qubit < s.num_qubits() || flag_qubit == syndrome_qubit {
        return Err(Error::InvalidStabilizer(format!("flag qubit {flag_qubit} clashes with another qubit")));
    }
    if placement.open_after >= placement.close_before || placement.close_before >= w {
        return Err(Error::InvalidStabilizer(format!("flag placement {placement:?} invalid for weight {w}")));
    }
    let coupling = Gate::Cx { control: syndrome_qubit, target: flag_qubit };
    let mut gates = vec![Gate::PrepPlus(syndrome_qubit), Gate::PrepZero(flag_qubit)];
    for (i, q) in s.support().into_iter().enumerate() {
        if i == placement.close_before {
            gates.push(coupling);
        }
        gates.push(data_gate(s, syndrome_qubit, q));
        if i == placement.open_after {
            gates.push(coupling);
        }
    }
    gates.push(Gate::MeasureX(syndrome_qubit));
    gates.push(Gate::MeasureZ(flag_qubit));
    let mut roles = data_roles(s);
    roles.insert(syndrome_qubit, Role::Syndrome);
    roles.insert(flag_qubit, Role::Flag);
    Ok(GadgetCircuit {
        gates,
        roles,
        measured_stabilizer: *s,
        syndrome_qubit,
        flag_qubit: Some(flag_qubit),
        placement: Some(placement),
    })
}

impl GadgetCircuit {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn roles(&self) -> &BTreeMap<QubitId, Role> {
        &self.roles
    }

    pub fn role(&self, q: QubitId) -> Option<Role> {
        self.roles.get(&q).copied()
    }

    pub fn measured_stabilizer(&self) -> &PauliOperator {
        &self.measured_stabilizer
    }

    /// The operator carries sign -1: the raw ancilla bit is inverted before
    /// it is reported.
    pub fn sign_flip(&self) -> bool {
        self.measured_stabilizer.phase() == Phase::MINUS_ONE
    }

    pub fn is_flagged(&self) -> bool {
        self.flag_qubit.is_some()
    }

    pub fn syndrome_qubit(&self) -> QubitId {
        self.syndrome_qubit
    }

    pub fn flag_qubit(&self) -> Option<QubitId> {
        self.flag_qubit
    }

    pub fn placement(&self) -> Option<FlagPlacement> {
        self.placement
    }

    pub fn num_data_qubits(&self) -> usize {
        self.measured_stabilizer.num_qubits()
    }

    /// Highest qubit id plus one.
    pub fn num_qubits(&self) -> usize {
        self.roles.keys().next_back().map_or(0, |q| q + 1)
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Same gate list with the flag couplings removed: the syndrome-only
    /// circuit that hook errors slip through. Used for negative controls.
    pub fn without_flag_couplings(&self) -> GadgetCircuit {
        let mut stripped = build_unflagged_gadget(&self.measured_stabilizer, self.syndrome_qubit)
            .expect("stabilizer was already validated");
        stripped.placement = None;
        stripped
    }

    fn qubit_label(&self, q: QubitId) -> String {
        match self.role(q) {
            Some(Role::Data) | None => format!("d{}", q + 1),
            Some(Role::Syndrome) => "s".into(),
            Some(Role::Flag) => "f".into(),
        }
    }

    /// One gate per line. Data qubits print 1-based as `d1..dn`, ancillas as
    /// `s` and `f`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let kind = if self.is_flagged() { "flagged" } else { "unflagged" };
        let _ = writeln!(out, "# measure {} ({kind})", self.measured_stabilizer);
        for g in &self.gates {
            let line = match *g {
                Gate::PrepPlus(q) => format!("PREP_X {}", self.qubit_label(q)),
                Gate::PrepZero(q) => format!("PREP_Z {}", self.qubit_label(q)),
                Gate::ControlledPauli { control, target, letter } => format!(
                    "C{} {} {}",
                    letter.as_char(),
                    self.qubit_label(control),
                    self.qubit_label(target)
                ),
                Gate::Cx { control, target } => {
                    format!("CNOT {} {}", self.qubit_label(control), self.qubit_label(target))
                }
                Gate::MeasureX(q) => format!("MEAS_X {}", self.qubit_label(q)),
                Gate::MeasureZ(q) => format!("MEAS_Z {}", self.qubit_label(q)),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for GadgetCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli;

    #[test]
    fn unflagged_counts() {
        let g = build_unflagged_gadget(&pauli("XZZXI"), 5).unwrap();
        assert_eq!(g.two_qubit_gate_count(), 4);
        let g = build_unflagged_gadget(&pauli("IIIXXXX"), 7).unwrap();
        assert_eq!(g.two_qubit_gate_count(), 4);
        let targets: Vec<_> = g
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::ControlledPauli { target, .. } => Some(target + 1),
                _ => None,
            })
            .collect();
        assert_eq!(targets, [4, 5, 6, 7]);
        let g = build_unflagged_gadget(&pauli("Z"), 1).unwrap();
        assert_eq!(g.two_qubit_gate_count(), 1);
    }

    #[test]
    fn flagged_counts() {
        assert_eq!(build_flagged_gadget(&pauli("IIIXXXX"), 7, 8).unwrap().two_qubit_gate_count(), 6);
        assert_eq!(build_flagged_gadget(&pauli("IZZXXYY"), 7, 8).unwrap().two_qubit_gate_count(), 8);
    }

    #[test]
    fn flagged_gate_order() {
        let g = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        let cp = |t, letter| Gate::ControlledPauli { control: 5, target: t, letter };
        let cx = Gate::Cx { control: 5, target: 6 };
        assert_eq!(
            g.gates(),
            &[
                Gate::PrepPlus(5),
                Gate::PrepZero(6),
                cp(0, Letter::X),
                cx,
                cp(1, Letter::Z),
                cp(2, Letter::Z),
                cx,
                cp(3, Letter::X),
                Gate::MeasureX(5),
                Gate::MeasureZ(6),
            ]
        );
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(build_unflagged_gadget(&pauli("III"), 3).is_err());
        assert!(build_unflagged_gadget(&pauli("+iXXX"), 3).is_err());
        assert!(build_unflagged_gadget(&pauli("-XXX"), 3).unwrap().sign_flip());
        assert!(build_flagged_gadget(&pauli("XXI"), 3, 4).is_err());
        assert!(build_flagged_gadget(&pauli("XXX"), 3, 3).is_err());
        assert!(build_unflagged_gadget(&pauli("XXX"), 1).is_err());
    }

    #[test]
    fn roles_are_assigned() {
        let g = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        assert_eq!(g.role(0), Some(Role::Data));
        assert_eq!(g.role(5), Some(Role::Syndrome));
        assert_eq!(g.role(6), Some(Role::Flag));
        assert_eq!(g.num_qubits(), 7);
    }

    #[test]
    fn dump_format() {
        let g = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        let expected = "\
# measure XZZXI (flagged)
PREP_X s
PREP_Z f
CX s d1
CNOT s f
CZ s d2
CZ s d3
CNOT s f
CX s d4
MEAS_X s
MEAS_Z f
";
        assert_eq!(g.dump(), expected);
    }
}
