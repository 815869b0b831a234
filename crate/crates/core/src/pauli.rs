//! Phase-tracked Pauli operators in bit-packed symplectic form.
//!
//! An operator on `n <= 64` qubits is stored as two `u64` masks (X and Z
//! components) plus a phase `i^k`. Qubit 1 in string notation (the leftmost
//! letter) is bit 0, so `"IIZXI"` carries Z on qubit 3 and X on qubit 4.
//! A position with both bits set is the Hermitian `Y`, not `XZ`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest register a [`PauliOperator`] can describe.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    /// `(x, z)` bits of the letter.
    pub const fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub const fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn anticommutes_with(self, other: Letter) -> bool {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        (ax & bz) ^ (az & bx)
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Global phase `i^k`, `k` taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub const fn from_exponent(k: u8) -> Phase {
        Phase(k & 3)
    }

    /// Exponent `k` of `i^k`.
    pub const fn exponent(self) -> u8 {
        self.0
    }

    pub const fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    pub const fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }

    pub const fn conj(self) -> Phase {
        Phase((4 - self.0) & 3)
    }

    fn prefix(self) -> &'static str {
        match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        }
    }
}

/// Sign of a Hermitian Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn phase(self) -> Phase {
        match self {
            Sign::Plus => Phase::PLUS_ONE,
            Sign::Minus => Phase::MINUS_ONE,
        }
    }
}

#[inline]
fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Exponent of `i` picked up when multiplying letter strings `(ax, az)` by
/// `(bx, bz)` position-wise, mod 4.
#[inline]
pub(crate) fn product_phase(ax: u64, az: u64, bx: u64, bz: u64) -> u8 {
    let a_x = ax & !az;
    let a_y = ax & az;
    let a_z = !ax & az;
    let b_x = bx & !bz;
    let b_y = bx & bz;
    let b_z = !bx & bz;
    // XY = iZ, YZ = iX, ZX = iY; the reversed orders carry -i.
    let plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
    let minus = (a_x & b_z) | (a_z & b_y) | (a_y & b_x);
    ((plus.count_ones() + 3 * minus.count_ones()) & 3) as u8
}

/// An n-qubit Pauli operator with exact phase.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: u8,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliOperator { n: n as u8, x: 0, z: 0, phase: Phase::PLUS_ONE }
    }

    /// Builds an operator from raw masks; bits at or above `n` are dropped.
    pub fn from_bits(n: usize, x: u64, z: u64, phase: Phase) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        let m = mask(n);
        PauliOperator { n: n as u8, x: x & m, z: z & m, phase }
    }

    /// Single letter `letter` on zero-based qubit `qubit`.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        assert!(qubit < n, "qubit {qubit} out of range for {n} qubits");
        let (x, z) = letter.bits();
        Self::from_bits(n, (x as u64) << qubit, (z as u64) << qubit, Phase::PLUS_ONE)
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Same letters, phase reset to `+1`.
    pub fn unsigned(self) -> Self {
        self.with_phase(Phase::PLUS_ONE)
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn set_letter(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.num_qubits());
        let (x, z) = letter.bits();
        let bit = 1u64 << qubit;
        self.x = (self.x & !bit) | if x { bit } else { 0 };
        self.z = (self.z & !bit) | if z { bit } else { 0 };
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.num_qubits()).map(|q| self.letter(q))
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    /// Zero-based qubits with a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&q| (self.support_mask() >> q) & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.num_qubits(), right: other.num_qubits() });
        }
        Ok(())
    }

    /// Phase-correct product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let k = product_phase(self.x, self.z, other.x, other.z);
        PauliOperator {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: self.phase.mul(other.phase).mul(Phase::from_exponent(k)),
        }
    }

    /// True iff `self · other = other · self`.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn anticommutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() & 1 == 1
    }

    /// Letters equal, phase ignored.
    pub fn same_letters(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Qubit-wise X<->Z swap (Y stays Y), keeping the phase.
    pub fn conjugate_xz(&self) -> Self {
        PauliOperator { n: self.n, x: self.z, z: self.x, phase: self.phase }
    }

    /// Rotate qubits right by `k`: the letter on qubit `q` moves to `q + k mod n`.
    pub fn cyclic_shift(&self, k: usize) -> Self {
        let n = self.num_qubits();
        let mut out = Self::identity(n).with_phase(self.phase);
        for q in 0..n {
            out.set_letter((q + k) % n, self.letter(q));
        }
        out
    }

    /// Letter string without any sign prefix.
    pub fn letter_string(&self) -> String {
        self.letters().map(Letter::as_char).collect()
    }
}

impl fmt::Display for PauliOperator {
    /// Letters only when the phase is `+1`, otherwise a `-`, `+i` or `-i` prefix.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != Phase::PLUS_ONE {
            f.write_str(self.phase.prefix())?;
        }
        f.write_str(&self.letter_string())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase.prefix(), self.letter_string())
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParsePauli(s.to_string());
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else {
            (Phase::PLUS_ONE, s)
        };
        if body.is_empty() || body.chars().count() > MAX_QUBITS {
            return Err(bad());
        }
        let letters = body.chars().map(Letter::from_char).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
        Ok(PauliOperator::from_letters(&letters).with_phase(phase))
    }
}

/// Parses a string that is known to be valid. Panics otherwise.
pub fn pauli(s: &str) -> PauliOperator {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

/// Total order used for deterministic tie-breaks: weight first, then the
/// letter string with `I < X < Y < Z`.
pub fn weight_then_lex(a: &PauliOperator, b: &PauliOperator) -> std::cmp::Ordering {
    a.weight()
        .cmp(&b.weight())
        .then_with(|| a.letters().cmp(b.letters()))
}

/// Every n-qubit Pauli string (phase `+1`), `4^n` of them.
pub fn all_paulis(n: usize) -> impl Iterator<Item = PauliOperator> {
    assert!(n <= 16);
    (0u64..1 << (2 * n)).map(move |code| {
        let x = code & mask(n);
        let z = code >> n;
        PauliOperator::from_bits(n, x, z, Phase::PLUS_ONE)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_products() {
        assert_eq!(pauli("X").multiply(&pauli("Z")).unwrap(), pauli("-iY"));
        assert_eq!(pauli("X").multiply(&pauli("Y")).unwrap(), pauli("+iZ"));
        assert_eq!(pauli("Y").multiply(&pauli("Z")).unwrap(), pauli("+iX"));
        assert_eq!(pauli("Z").multiply(&pauli("X")).unwrap(), pauli("+iY"));
        assert_eq!(pauli("Y").multiply(&pauli("Y")).unwrap(), pauli("I"));
    }

    #[test]
    fn product_of_two_generators() {
        let p = pauli("XIXZZ").multiply(&pauli("ZXIXZ")).unwrap();
        assert_eq!(p, pauli("YXXYI"));
        assert_eq!(p.phase(), Phase::PLUS_ONE);
    }

    #[test]
    fn identity_is_neutral() {
        let p = pauli("-iXYZIZ");
        let id = PauliOperator::identity(5);
        assert_eq!(p.multiply(&id).unwrap(), p);
        assert_eq!(id.multiply(&p).unwrap(), p);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            pauli("XX").multiply(&pauli("X")),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(pauli("XX").commutes(&pauli("XXX")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(!pauli("X").commutes(&pauli("Z")).unwrap());
        assert!(pauli("XZZXI").commutes(&pauli("IXZZX")).unwrap());
        assert!(!pauli("IIIZIII").commutes(&pauli("IIIXXXX")).unwrap());
    }

    #[test]
    fn parse_and_print() {
        for s in ["XIZY", "-XX", "+iZ", "-iIIY"] {
            assert_eq!(pauli(s).to_string(), s);
        }
        assert_eq!(pauli("+XZ").to_string(), "XZ");
        assert!("XQ".parse::<PauliOperator>().is_err());
        assert!("".parse::<PauliOperator>().is_err());
        assert!("-".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn string_indexing_is_left_to_right() {
        let p = pauli("IIZXI");
        assert_eq!(p.letter(2), Letter::Z);
        assert_eq!(p.letter(3), Letter::X);
        assert_eq!(p.support(), vec![2, 3]);
        assert_eq!(p.weight(), 2);
    }

    #[test]
    fn shifts_and_conjugates() {
        assert_eq!(pauli("XZZXI").cyclic_shift(1), pauli("IXZZX"));
        assert_eq!(pauli("IIIXXXX").conjugate_xz(), pauli("IIIZZZZ"));
        assert_eq!(pauli("XYZ").conjugate_xz(), pauli("ZYX"));
    }

    #[test]
    fn enumerates_all_strings() {
        assert_eq!(all_paulis(3).count(), 64);
        let distinct: std::collections::HashSet<_> = all_paulis(3).collect();
        assert_eq!(distinct.len(), 64);
    }
}
