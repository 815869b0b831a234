//! Circuit-level depolarizing noise: sampling for Monte Carlo and exhaustive
//! single-fault enumeration for verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gadget::{Gate, GadgetCircuit};
use crate::pauli::Letter;

/// Upper limit on `p`: a two-qubit fault cannot exceed certainty.
pub const MAX_ERROR_RATE: f64 = 15.0 / 16.0;

/// The 15 non-identity two-qubit Pauli pairs in lexicographic order.
pub const PAULI_PAIRS: [(Letter, Letter); 15] = {
    use Letter::*;
    [
        (I, X), (I, Y), (I, Z),
        (X, I), (X, X), (X, Y), (X, Z),
        (Y, I), (Y, X), (Y, Y), (Y, Z),
        (Z, I), (Z, X), (Z, Y), (Z, Z),
    ]
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultKind {
    /// Pauli pair applied after a two-qubit gate, on (control, target).
    TwoQubit(Letter, Letter),
    /// `|0>` prepared as `|1>`, or `|+>` as `|->`.
    PrepFlip,
    /// Recorded bit inverted.
    MeasureFlip,
}

/// A fault attached to gate `location` of a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultEvent {
    pub location: usize,
    pub kind: FaultKind,
}

impl FaultEvent {
    pub fn validate(&self, c: &GadgetCircuit) -> Result<()> {
        let gate = c
            .gates()
            .get(self.location)
            .ok_or(Error::InvalidFault { location: self.location, reason: "past the end of the circuit" })?;
        let ok = match self.kind {
            FaultKind::TwoQubit(a, b) => gate.is_two_qubit() && (a, b) != (Letter::I, Letter::I),
            FaultKind::PrepFlip => gate.is_prep(),
            FaultKind::MeasureFlip => gate.is_measurement(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFault { location: self.location, reason: "fault kind does not match the gate" })
        }
    }
}

/// Two-qubit gates fail with probability `p`; preparations and measurements
/// with `4p/15`. Single-qubit gates and idle qubits are noiseless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    p: f64,
    gate_threshold: u64,
    flip_threshold: u64,
}

fn threshold(prob: f64) -> u64 {
    if prob >= 1.0 {
        u64::MAX
    } else {
        (prob * 18_446_744_073_709_551_616.0) as u64
    }
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=MAX_ERROR_RATE).contains(&p) {
            return Err(Error::ErrorRateOutOfRange(p));
        }
        Ok(NoiseModel { p, gate_threshold: threshold(p), flip_threshold: threshold(4.0 * p / 15.0) })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn prep_flip_probability(&self) -> f64 {
        4.0 * self.p / 15.0
    }

    pub fn measurement_flip_probability(&self) -> f64 {
        4.0 * self.p / 15.0
    }

    pub fn is_noiseless(&self) -> bool {
        self.p == 0.0
    }

    /// Draws the fault (if any) for a single gate. One 64-bit draw per gate;
    /// the Pauli pair is read off the same draw, which is uniform on
    /// `[0, threshold)` once a fault has occurred.
    #[inline]
    pub fn sample_gate<R: Rng + ?Sized>(&self, location: usize, gate: &Gate, rng: &mut R) -> Option<FaultEvent> {
        let r = rng.next_u64();
        if gate.is_two_qubit() {
            if r < self.gate_threshold {
                let idx = ((r as u128 * 15) / (self.gate_threshold as u128)) as usize;
                let (a, b) = PAULI_PAIRS[idx.min(14)];
                return Some(FaultEvent { location, kind: FaultKind::TwoQubit(a, b) });
            }
        } else if r < self.flip_threshold {
            let kind = if gate.is_prep() { FaultKind::PrepFlip } else { FaultKind::MeasureFlip };
            return Some(FaultEvent { location, kind });
        }
        None
    }
}

/// Independently samples a fault for each gate of `c`.
pub fn sample_faults<R: Rng + ?Sized>(c: &GadgetCircuit, model: &NoiseModel, rng: &mut R) -> Vec<FaultEvent> {
    if model.is_noiseless() {
        return Vec::new();
    }
    c.gates()
        .iter()
        .enumerate()
        .filter_map(|(i, g)| model.sample_gate(i, g, rng))
        .collect()
}

/// Every distinct single fault: 15 per two-qubit gate, one flip per
/// preparation and per measurement.
pub fn enumerate_single_faults(c: &GadgetCircuit) -> Vec<FaultEvent> {
    let mut out = Vec::new();
    for (location, g) in c.gates().iter().enumerate() {
        if g.is_two_qubit() {
            out.extend(PAULI_PAIRS.iter().map(|&(a, b)| FaultEvent { location, kind: FaultKind::TwoQubit(a, b) }));
        } else if g.is_prep() {
            out.push(FaultEvent { location, kind: FaultKind::PrepFlip });
        } else {
            out.push(FaultEvent { location, kind: FaultKind::MeasureFlip });
        }
    }
    out
}

/// Counter-based stream for one Monte Carlo trial: the key comes from the
/// global seed and the stream id is the trial index, so a trial's randomness
/// does not depend on which worker runs it.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{build_flagged_gadget, build_unflagged_gadget};
    use rand::RngCore;
    use crate::pauli::pauli;

    #[test]
    fn enumeration_counts() {
        let f = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        assert_eq!(enumerate_single_faults(&f).len(), 94);
        let u = build_unflagged_gadget(&pauli("XZZXI"), 5).unwrap();
        assert_eq!(enumerate_single_faults(&u).len(), 62);
    }

    #[test]
    fn enumeration_has_no_duplicates_and_covers_every_gate() {
        let f = build_flagged_gadget(&pauli("IIIXXXX"), 7, 8).unwrap();
        let all = enumerate_single_faults(&f);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        for loc in 0..f.gates().len() {
            assert!(all.iter().any(|e| e.location == loc));
        }
        assert!(all.iter().all(|e| e.validate(&f).is_ok()));
    }

    #[test]
    fn zero_rate_is_silent() {
        let f = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        let model = NoiseModel::new(0.0).unwrap();
        let mut rng = trial_rng(1, 2);
        for _ in 0..100 {
            assert!(sample_faults(&f, &model, &mut rng).is_empty());
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let f = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        let model = NoiseModel::new(0.3).unwrap();
        let a = sample_faults(&f, &model, &mut trial_rng(9, 17));
        let b = sample_faults(&f, &model, &mut trial_rng(9, 17));
        assert_eq!(a, b);
        let draws = |trial| -> Vec<u64> {
            let mut rng = trial_rng(9, trial);
            (0..4).map(|_| rng.next_u64()).collect()
        };
        assert_ne!(draws(17), draws(18));
    }

    #[test]
    fn rate_range_is_checked() {
        assert!(NoiseModel::new(-0.1).is_err());
        assert!(NoiseModel::new(0.95).is_err());
        assert!(NoiseModel::new(MAX_ERROR_RATE).is_ok());
    }

    #[test]
    fn invalid_fault_kinds_are_rejected() {
        let f = build_unflagged_gadget(&pauli("XZZXI"), 5).unwrap();
        assert!(FaultEvent { location: 0, kind: FaultKind::MeasureFlip }.validate(&f).is_err());
        assert!(FaultEvent { location: 1, kind: FaultKind::PrepFlip }.validate(&f).is_err());
        assert!(FaultEvent { location: 99, kind: FaultKind::PrepFlip }.validate(&f).is_err());
        assert!(FaultEvent { location: 1, kind: FaultKind::TwoQubit(Letter::I, Letter::I) }.validate(&f).is_err());
    }
}
