//! Stabilizer codes and stabilizer-group services.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{pauli, PauliOperator, Sign};

/// Outcome of [`StabilizerCode::classify_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidualClass {
    /// Element of the stabilizer group (up to phase): harmless.
    Stabilizer,
    /// Commutes with every generator but is not generated: a logical error.
    Logical,
    /// Anticommutes with at least one generator.
    Detectable,
}

#[derive(Clone, Copy)]
struct PivotRow {
    pivot: u32,
    vector: u128,
    combo: u64,
}

/// An `[[n, k, d]]` stabilizer code with `k = 1`.
#[derive(Clone)]
pub struct StabilizerCode {
    name: &'static str,
    n: usize,
    k: usize,
    d: usize,
    generators: Vec<PauliOperator>,
    logical_x: PauliOperator,
    logical_z: PauliOperator,
    echelon: Vec<PivotRow>,
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{},{}]] {}", self.n, self.k, self.d, self.name)
    }
}

fn symplectic(p: &PauliOperator) -> u128 {
    p.x_bits() as u128 | ((p.z_bits() as u128) << 64)
}

impl StabilizerCode {
    /// Builds a code and checks the commutation structure. Fails on
    /// non-commuting or dependent generators, or on bad logicals.
    pub fn new(
        name: &'static str,
        d: usize,
        generators: Vec<PauliOperator>,
        logical_x: PauliOperator,
        logical_z: PauliOperator,
    ) -> Result<Self> {
        let n = logical_x.num_qubits();
        let bad = |msg: String| Err(Error::Construction(format!("{name}: {msg}")));
        for g in generators.iter().chain([&logical_x, &logical_z]) {
            if g.num_qubits() != n {
                return bad(format!("{g} has the wrong length"));
            }
            if g.phase() != crate::pauli::Phase::PLUS_ONE {
                return bad(format!("{g:?} must carry phase +1"));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if a.anticommutes_unchecked(b) {
                    return bad(format!("{a} and {b} anticommute"));
                }
            }
            if a.anticommutes_unchecked(&logical_x) || a.anticommutes_unchecked(&logical_z) {
                return bad(format!("{a} anticommutes with a logical operator"));
            }
        }
        if !logical_x.anticommutes_unchecked(&logical_z) {
            return bad("logical X and Z commute".into());
        }

        let mut echelon: Vec<PivotRow> = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            let mut row = PivotRow { pivot: 0, vector: symplectic(g), combo: 1 << i };
            for r in &echelon {
                if (row.vector >> r.pivot) & 1 == 1 {
                    row.vector ^= r.vector;
                    row.combo ^= r.combo;
                }
            }
            if row.vector == 0 {
                return bad(format!("generator {g} is dependent"));
            }
            row.pivot = row.vector.trailing_zeros();
            for r in echelon.iter_mut() {
                if (r.vector >> row.pivot) & 1 == 1 {
                    r.vector ^= row.vector;
                    r.combo ^= row.combo;
                }
            }
            echelon.push(row);
        }
        let k = n - generators.len();
        Ok(StabilizerCode { name, n, k, d, generators, logical_x, logical_z, echelon })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn logical_x(&self) -> &PauliOperator {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliOperator {
        &self.logical_z
    }

    /// True when every generator is pure X or pure Z type.
    pub fn is_css(&self) -> bool {
        self.generators.iter().all(|g| g.x_bits() == 0 || g.z_bits() == 0)
    }

    /// Generators of pure X type, in generator order.
    pub fn x_type_generators(&self) -> Vec<PauliOperator> {
        self.generators.iter().copied().filter(|g| g.z_bits() == 0).collect()
    }

    /// Generators of pure Z type, in generator order.
    pub fn z_type_generators(&self) -> Vec<PauliOperator> {
        self.generators.iter().copied().filter(|g| g.x_bits() == 0).collect()
    }

    /// Ordered product of the generators selected by `combo` (bit i = generator i).
    pub fn product_of(&self, combo: u64) -> PauliOperator {
        self.generators
            .iter()
            .enumerate()
            .filter(|(i, _)| (combo >> i) & 1 == 1)
            .fold(PauliOperator::identity(self.n), |acc, (_, g)| acc.mul_unchecked(g))
    }

    /// All `2^(n-k)` group elements, indexed by generator combination.
    pub fn group_elements(&self) -> Vec<PauliOperator> {
        (0u64..1 << self.generators.len()).map(|c| self.product_of(c)).collect()
    }

    /// Sign `s` such that `s` times the letters of `p` lies in the stabilizer
    /// group; `None` when no such element exists. The phase of `p` is ignored.
    pub fn group_membership(&self, p: &PauliOperator) -> Result<Option<Sign>> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch { left: p.num_qubits(), right: self.n });
        }
        Ok(self.membership_unchecked(p))
    }

    pub(crate) fn membership_unchecked(&self, p: &PauliOperator) -> Option<Sign> {
        let mut v = symplectic(p);
        let mut combo = 0u64;
        for r in &self.echelon {
            if (v >> r.pivot) & 1 == 1 {
                v ^= r.vector;
                combo ^= r.combo;
            }
        }
        if v != 0 {
            return None;
        }
        match self.product_of(combo).phase().exponent() {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => unreachable!("hermitian group element with imaginary phase"),
        }
    }

    /// Bit `i` set iff `e` anticommutes with generator `i`.
    #[inline]
    pub fn syndrome(&self, e: &PauliOperator) -> u32 {
        self.generators
            .iter()
            .enumerate()
            .fold(0, |s, (i, g)| s | ((e.anticommutes_unchecked(g) as u32) << i))
    }

    pub fn classify_residual(&self, e: &PauliOperator) -> Result<ResidualClass> {
        if e.num_qubits() != self.n {
            return Err(Error::LengthMismatch { left: e.num_qubits(), right: self.n });
        }
        Ok(self.classify_unchecked(e))
    }

    pub(crate) fn classify_unchecked(&self, e: &PauliOperator) -> ResidualClass {
        if self.syndrome(e) != 0 {
            ResidualClass::Detectable
        } else if self.membership_unchecked(e).is_some() {
            ResidualClass::Stabilizer
        } else {
            ResidualClass::Logical
        }
    }

    /// True iff `a` and `b` differ by a stabilizer (phases ignored).
    pub fn equivalent(&self, a: &PauliOperator, b: &PauliOperator) -> bool {
        self.membership_unchecked(&a.mul_unchecked(b)).is_some()
    }

    /// Minimum-weight member of the coset `e · S`, ties broken by letter order.
    pub fn min_weight_representative(&self, e: &PauliOperator) -> PauliOperator {
        (0u64..1 << self.generators.len())
            .map(|c| e.mul_unchecked(&self.product_of(c)).unsigned())
            .min_by(crate::pauli::weight_then_lex)
            .expect("group is non-empty")
    }

    /// True iff `p`, sign included, is an element of the group, so that the
    /// code space lies in its +1 eigenspace.
    pub fn is_plus_one_element(&self, p: &PauliOperator) -> bool {
        let want = match p.phase() {
            crate::pauli::Phase::PLUS_ONE => Sign::Plus,
            crate::pauli::Phase::MINUS_ONE => Sign::Minus,
            _ => return false,
        };
        p.num_qubits() == self.n && self.membership_unchecked(p) == Some(want)
    }
}

/// The cyclic [[5,1,3]] code, logical operators `XXXXX` and `ZZZZZ`.
pub fn code_513() -> StabilizerCode {
    StabilizerCode::new(
        "five-qubit",
        3,
        ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].map(pauli).to_vec(),
        pauli("XXXXX"),
        pauli("ZZZZZ"),
    )
    .expect("five-qubit code is well formed")
}

/// The [[7,1,3]] Steane code. X-type generators first, then their
/// qubit-wise Z conjugates in the same order.
pub fn code_steane() -> StabilizerCode {
    StabilizerCode::new(
        "steane",
        3,
        ["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"].map(pauli).to_vec(),
        pauli("XXXXXXX"),
        pauli("ZZZZZZZ"),
    )
    .expect("steane code is well formed")
}
