//! Stabilizer tableau in the Aaronson–Gottesman layout: `n` destabilizer
//! rows and `n` stabilizer rows, each a phase-tracked Pauli.

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::gadget::{Gate, GadgetCircuit};
use crate::noise::{FaultEvent, FaultKind};
use crate::pauli::{Letter, Phase, PauliOperator};

use super::{Engine, GadgetOutcome, OutcomeRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub bit: bool,
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    destab: Vec<PauliOperator>,
    stab: Vec<PauliOperator>,
}

#[inline]
fn negate(p: &mut PauliOperator) {
    *p = p.with_phase(p.phase().mul(Phase::MINUS_ONE));
}

impl Tableau {
    /// `|0...0>`.
    pub fn new(n: usize) -> Self {
        Tableau {
            n,
            destab: (0..n).map(|q| PauliOperator::single(n, q, Letter::X)).collect(),
            stab: (0..n).map(|q| PauliOperator::single(n, q, Letter::Z)).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliOperator] {
        &self.stab
    }

    pub fn destabilizers(&self) -> &[PauliOperator] {
        &self.destab
    }

    /// Appends fresh qubits in `|0>` until there are `n` of them.
    pub fn extend_to(&mut self, n: usize) {
        if n <= self.n {
            return;
        }
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            *row = PauliOperator::from_bits(n, row.x_bits(), row.z_bits(), row.phase());
        }
        for q in self.n..n {
            self.destab.push(PauliOperator::single(n, q, Letter::X));
            self.stab.push(PauliOperator::single(n, q, Letter::Z));
        }
        self.n = n;
    }

    fn map_rows(&mut self, f: impl Fn(u64, u64, Phase) -> (u64, u64, Phase)) {
        let n = self.n;
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            let (x, z, ph) = f(row.x_bits(), row.z_bits(), row.phase());
            *row = PauliOperator::from_bits(n, x, z, ph);
        }
    }

    pub fn h(&mut self, q: usize) {
        self.map_rows(|x, z, ph| {
            let (xq, zq) = ((x >> q) & 1, (z >> q) & 1);
            let ph = if xq & zq == 1 { ph.mul(Phase::MINUS_ONE) } else { ph };
            let x2 = (x & !(1 << q)) | (zq << q);
            let z2 = (z & !(1 << q)) | (xq << q);
            (x2, z2, ph)
        });
    }

    pub fn s(&mut self, q: usize) {
        self.map_rows(|x, z, ph| {
            let (xq, zq) = ((x >> q) & 1, (z >> q) & 1);
            let ph = if xq & zq == 1 { ph.mul(Phase::MINUS_ONE) } else { ph };
            (x, z ^ (xq << q), ph)
        });
    }

    pub fn s_dag(&mut self, q: usize) {
        self.map_rows(|x, z, ph| {
            let (xq, zq) = ((x >> q) & 1, (z >> q) & 1);
            let ph = if xq & !zq & 1 == 1 { ph.mul(Phase::MINUS_ONE) } else { ph };
            (x, z ^ (xq << q), ph)
        });
    }

    pub fn cx(&mut self, a: usize, b: usize) {
        self.map_rows(|x, z, ph| {
            let (xa, za) = ((x >> a) & 1, (z >> a) & 1);
            let (xb, zb) = ((x >> b) & 1, (z >> b) & 1);
            let ph = if xa & zb & (xb ^ za ^ 1) == 1 { ph.mul(Phase::MINUS_ONE) } else { ph };
            (x ^ (xa << b), z ^ (zb << a), ph)
        });
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cx(a, b);
        self.h(b);
    }

    pub fn cy(&mut self, a: usize, b: usize) {
        self.s_dag(b);
        self.cx(a, b);
        self.s(b);
    }

    pub fn controlled_pauli(&mut self, control: usize, target: usize, letter: Letter) {
        match letter {
            Letter::I => {}
            Letter::X => self.cx(control, target),
            Letter::Y => self.cy(control, target),
            Letter::Z => self.cz(control, target),
        }
    }

    /// Conjugates the state by a Pauli (flips the sign of anticommuting rows).
    pub fn apply_pauli(&mut self, e: &PauliOperator) {
        let e = self.widen(e);
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            if row.anticommutes_unchecked(&e) {
                negate(row);
            }
        }
    }

    fn widen(&self, p: &PauliOperator) -> PauliOperator {
        assert!(p.num_qubits() <= self.n, "operator wider than the tableau");
        PauliOperator::from_bits(self.n, p.x_bits(), p.z_bits(), p.phase())
    }

    /// Deterministic value of measuring the letters of `p`, or `None` if the
    /// outcome would be random. Does not change the state.
    pub fn peek(&self, p: &PauliOperator) -> Option<bool> {
        let p = self.widen(p);
        if self.stab.iter().any(|r| r.anticommutes_unchecked(&p)) {
            return None;
        }
        let acc = self
            .destab
            .iter()
            .zip(&self.stab)
            .filter(|(d, _)| d.anticommutes_unchecked(&p))
            .fold(PauliOperator::identity(self.n), |acc, (_, s)| acc.mul_unchecked(s));
        debug_assert!(acc.same_letters(&p));
        Some(acc.phase() == Phase::MINUS_ONE)
    }

    /// Measures the letters of `p` (phase ignored). A random outcome is taken
    /// from `choose`.
    pub fn measure(&mut self, p: &PauliOperator, choose: impl FnOnce() -> bool) -> Measurement {
        let p = self.widen(p).unsigned();
        let Some(pivot) = self.stab.iter().position(|r| r.anticommutes_unchecked(&p)) else {
            let bit = self.peek(&p).expect("commutes with every stabilizer");
            return Measurement { bit, deterministic: true };
        };
        let pivot_row = self.stab[pivot];
        for (i, row) in self.stab.iter_mut().enumerate() {
            if i != pivot && row.anticommutes_unchecked(&p) {
                *row = row.mul_unchecked(&pivot_row);
            }
        }
        for (i, row) in self.destab.iter_mut().enumerate() {
            if i != pivot && row.anticommutes_unchecked(&p) {
                *row = row.mul_unchecked(&pivot_row);
            }
        }
        self.destab[pivot] = pivot_row;
        let bit = choose();
        self.stab[pivot] = if bit { p.with_phase(Phase::MINUS_ONE) } else { p };
        Measurement { bit, deterministic: false }
    }

    pub fn reset_zero(&mut self, q: usize) {
        let z = PauliOperator::single(self.n, q, Letter::Z);
        if self.measure(&z, || false).bit {
            self.apply_pauli(&PauliOperator::single(self.n, q, Letter::X));
        }
    }

    pub fn reset_plus(&mut self, q: usize) {
        let x = PauliOperator::single(self.n, q, Letter::X);
        if self.measure(&x, || false).bit {
            self.apply_pauli(&PauliOperator::single(self.n, q, Letter::Z));
        }
    }

    /// True iff `p` (with its sign) stabilizes the state.
    pub fn is_stabilized_by(&self, p: &PauliOperator) -> bool {
        let want_minus = match p.phase() {
            Phase::PLUS_ONE => false,
            Phase::MINUS_ONE => true,
            _ => return false,
        };
        self.peek(p) == Some(want_minus)
    }

    /// Projects onto the +1 eigenspace of each operator in turn.
    fn project_plus(&mut self, ops: &[PauliOperator]) -> Result<()> {
        for g in ops {
            let m = self.measure(g, || false);
            if m.bit {
                return Err(Error::Construction(format!("state has deterministic -1 eigenvalue for {g}")));
            }
        }
        Ok(())
    }
}

/// Logical `|0>` of `code`, prepared by projecting `|0...0>` onto the code space.
pub fn encode_logical_zero(code: &StabilizerCode) -> Tableau {
    let mut t = Tableau::new(code.n());
    t.project_plus(code.generators()).expect("|0...0> overlaps the logical zero state");
    debug_assert!(t.is_stabilized_by(code.logical_z()));
    t
}

/// Logical `|+>` of `code`, prepared from `|+...+>`.
pub fn encode_logical_plus(code: &StabilizerCode) -> Tableau {
    let mut t = Tableau::new(code.n());
    for q in 0..code.n() {
        t.h(q);
    }
    t.project_plus(code.generators()).expect("|+...+> overlaps the logical plus state");
    debug_assert!(t.is_stabilized_by(code.logical_x()));
    t
}

fn execute<F>(t: &mut Tableau, c: &GadgetCircuit, mut fault_at: F, record: &mut OutcomeRecord) -> Result<()>
where
    F: FnMut(usize, &Gate) -> Option<FaultKind>,
{
    t.extend_to(c.num_qubits());
    let n = t.num_qubits();
    for (i, g) in c.gates().iter().enumerate() {
        let fault = fault_at(i, g);
        let pair = |t: &mut Tableau, a: usize, b: usize| {
            if let Some(FaultKind::TwoQubit(la, lb)) = fault {
                let mut e = PauliOperator::identity(n);
                e.set_letter(a, la);
                e.set_letter(b, lb);
                t.apply_pauli(&e);
            }
        };
        let flip = fault == Some(FaultKind::MeasureFlip);
        match *g {
            Gate::PrepPlus(q) => {
                t.reset_plus(q);
                if fault == Some(FaultKind::PrepFlip) {
                    t.apply_pauli(&PauliOperator::single(n, q, Letter::Z));
                }
            }
            Gate::PrepZero(q) => {
                t.reset_zero(q);
                if fault == Some(FaultKind::PrepFlip) {
                    t.apply_pauli(&PauliOperator::single(n, q, Letter::X));
                }
            }
            Gate::ControlledPauli { control, target, letter } => {
                t.controlled_pauli(control, target, letter);
                pair(t, control, target);
            }
            Gate::Cx { control, target } => {
                t.cx(control, target);
                pair(t, control, target);
            }
            Gate::MeasureX(q) | Gate::MeasureZ(q) => {
                let letter = if matches!(g, Gate::MeasureX(_)) { Letter::X } else { Letter::Z };
                let m = t.measure(&PauliOperator::single(n, q, letter), || false);
                if !m.deterministic {
                    return Err(Error::InvalidInput(format!(
                        "measurement at gate {i} is not deterministic; input is not a stabilizer eigenstate"
                    )));
                }
                let sign = q == c.syndrome_qubit() && c.sign_flip();
                record.entries.push((i, m.bit ^ flip ^ sign));
            }
        }
    }
    Ok(())
}

/// Executes `c` on a copy of `state` with faults applied right after their
/// gates. Ancillas are left measured; the next preparation resets them.
pub fn tableau_run(c: &GadgetCircuit, state: &Tableau, faults: &[FaultEvent]) -> Result<(OutcomeRecord, Tableau)> {
    for f in faults {
        f.validate(c)?;
    }
    let mut t = state.clone();
    let mut record = OutcomeRecord::default();
    execute(
        &mut t,
        c,
        |i, _| {
            // Multi-fault injections at one location are folded by applying
            // all of them; only two-qubit pairs can coincide meaningfully.
            let mut kinds = faults.iter().filter(|f| f.location == i).map(|f| f.kind);
            let first = kinds.next();
            debug_assert!(kinds.next().is_none(), "use TableauEngine for stacked faults");
            first
        },
        &mut record,
    )?;
    Ok((record, t))
}

/// Tableau-backed engine. `reference` is the logical operator stabilizing
/// the starting state (logical Z for `|0>`, logical X for `|+>`).
#[derive(Debug, Clone)]
pub struct TableauEngine {
    tableau: Tableau,
    num_data: usize,
    reference: PauliOperator,
}

impl TableauEngine {
    pub fn logical_zero(code: &StabilizerCode) -> Self {
        TableauEngine { tableau: encode_logical_zero(code), num_data: code.n(), reference: *code.logical_z() }
    }

    pub fn logical_plus(code: &StabilizerCode) -> Self {
        TableauEngine { tableau: encode_logical_plus(code), num_data: code.n(), reference: *code.logical_x() }
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    /// True iff undoing `e` returns the data to the starting code state, i.e.
    /// `e` matches the actual data error up to the state's own stabilizers.
    pub fn residual_matches(&self, code: &StabilizerCode, e: &PauliOperator) -> bool {
        let mut t = self.tableau.clone();
        t.apply_pauli(e);
        code.generators().iter().chain([&self.reference]).all(|g| t.is_stabilized_by(g))
    }
}

impl Engine for TableauEngine {
    fn run_gadget<F>(&mut self, c: &GadgetCircuit, fault_at: F) -> Result<GadgetOutcome>
    where
        F: FnMut(usize, &Gate) -> Option<FaultKind>,
    {
        let mut record = OutcomeRecord::default();
        execute(&mut self.tableau, c, fault_at, &mut record)?;
        let mut out = GadgetOutcome::default();
        for (i, bit) in record.entries {
            match c.gates()[i] {
                Gate::MeasureX(q) | Gate::MeasureZ(q) if q == c.syndrome_qubit() => out.syndrome = bit,
                _ => out.flag = Some(bit),
            }
        }
        Ok(out)
    }

    fn apply_data_pauli(&mut self, p: &PauliOperator) {
        self.tableau.apply_pauli(p);
    }

    fn num_data_qubits(&self) -> usize {
        self.num_data
    }
}
