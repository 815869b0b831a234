//! Exhaustive single-fault analysis: propagated-error sets, lookup-table
//! construction, fault-tolerance certification, and the constrained searches
//! that fill in protocol choices.

mod search;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub use search::{
    five_qubit_flag_completions, flag_branch_errors, provenance, search_completion, search_w6_choice, steane_flag_completions, w6_choice, Completion,
    Level, SearchConstraints,
};

use crate::code::{ResidualClass, StabilizerCode};
use crate::engine::{FrameEngine, GadgetOutcome};
use crate::gadget::GadgetCircuit;
use crate::noise::{enumerate_single_faults, FaultEvent};
use crate::pauli::{all_paulis, weight_then_lex, PauliOperator};
use crate::protocol::{
    run_protocol, walk, HistoryKey, InjectedFaults, LutSet, MissPolicy, Node, NodeId, NoFaults, Protocol, ProtocolTree,
};

/// Final noiseless round: measure every generator and apply the
/// minimum-weight correction for the syndrome. CSS codes decode the X and Z
/// halves separately.
#[derive(Debug, Clone)]
pub struct PerfectRoundDecoder {
    code: StabilizerCode,
    table: Vec<PauliOperator>,
}

impl PerfectRoundDecoder {
    pub fn new(code: &StabilizerCode) -> Self {
        let n = code.n();
        let size = 1usize << code.num_generators();
        let mut sorted: Vec<PauliOperator> = all_paulis(n).collect();
        sorted.sort_by(weight_then_lex);
        let first_with = |pred: &dyn Fn(&PauliOperator) -> bool, mask: u32| {
            let mut t: Vec<Option<PauliOperator>> = vec![None; size];
            for p in sorted.iter().filter(|p| pred(p)) {
                let s = (code.syndrome(p) & mask) as usize;
                if t[s].is_none() {
                    t[s] = Some(*p);
                }
            }
            t
        };
        let table = if code.is_css() {
            let x_mask: u32 = code.generators().iter().enumerate().filter(|(_, g)| g.z_bits() == 0).map(|(i, _)| 1 << i).sum();
            let z_mask = (size as u32 - 1) & !x_mask;
            // X-type checks see Z errors, Z-type checks see X errors.
            let z_fix = first_with(&|p| p.x_bits() == 0, x_mask);
            let x_fix = first_with(&|p| p.z_bits() == 0, z_mask);
            (0..size as u32)
                .map(|s| {
                    let a = z_fix[(s & x_mask) as usize].expect("every X-check syndrome is reachable");
                    let b = x_fix[(s & z_mask) as usize].expect("every Z-check syndrome is reachable");
                    a.mul_unchecked(&b).unsigned()
                })
                .collect()
        } else {
            first_with(&|_| true, u32::MAX)
                .into_iter()
                .map(|c| c.expect("every syndrome is reachable"))
                .collect()
        };
        PerfectRoundDecoder { code: code.clone(), table }
    }

    /// Correction indexed by syndrome (bit i = generator i).
    pub fn table(&self) -> &[PauliOperator] {
        &self.table
    }

    pub fn correction(&self, syndrome: u32) -> PauliOperator {
        self.table[syndrome as usize]
    }

    /// Residual left after the round acts on data error `e`.
    #[inline]
    pub fn apply(&self, e: &PauliOperator) -> PauliOperator {
        e.mul_unchecked(&self.table[self.code.syndrome(e) as usize])
    }

    /// True iff the round returns `e` to the code space with no logical error.
    #[inline]
    pub fn decodes(&self, e: &PauliOperator) -> bool {
        self.code.classify_unchecked(&self.apply(e)) == ResidualClass::Stabilizer
    }

    /// Minimum-weight correction `C` such that every `r * C` is decoded by
    /// this round, or `None` when the residuals conflict.
    pub fn common_correction(&self, residuals: &[PauliOperator]) -> Option<PauliOperator> {
        let first = residuals.first()?;
        // Only the class of C matters, and r0 * C must be decodable, so C is
        // r0 times some table entry up to stabilizers.
        self.table
            .iter()
            .map(|d| first.mul_unchecked(d))
            .filter(|c| residuals.iter().all(|r| self.decodes(&r.mul_unchecked(c))))
            .map(|c| self.code.min_weight_representative(&c))
            .min_by(weight_then_lex)
    }
}

/// Residual data errors of flag-firing single faults in `g`, one per class
/// modulo the stabilizer group, identity class excluded. Each class is shown
/// by its lightest raw residual.
pub fn propagated_error_set(code: &StabilizerCode, g: &GadgetCircuit) -> Vec<PauliOperator> {
    let mut raw: Vec<PauliOperator> = enumerate_single_faults(g)
        .into_iter()
        .filter_map(|f| {
            let mut engine = FrameEngine::new(code.n());
            let out = engine.run_gadget_with_faults(g, &[f]).expect("enumerated faults are valid");
            out.flag_fired().then(|| engine.data_error())
        })
        .filter(|e| code.membership_unchecked(e).is_none())
        .collect();
    raw.sort_by(weight_then_lex);
    let mut out: Vec<PauliOperator> = Vec::new();
    for e in raw {
        if !out.iter().any(|o| code.equivalent(o, &e)) {
            out.push(e);
        }
    }
    out
}

/// Lower bound on syndrome bits needed to tell apart the classes in
/// `errors` and the all-trivial pattern reserved for a measurement error.
pub fn min_syndrome_bits(errors: &[PauliOperator], code: &StabilizerCode) -> usize {
    let mut classes: Vec<PauliOperator> = Vec::new();
    for e in errors {
        if !classes.iter().any(|c| code.equivalent(c, e)) {
            classes.push(*e);
        }
    }
    let patterns = classes.len() + 1;
    (usize::BITS - (patterns - 1).leading_zeros()) as usize
}

/// One deterministic execution: a single fault (or none) and where it leads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultScenario {
    /// Gadget index in execution order and the fault within it.
    pub fault: Option<(usize, FaultEvent)>,
    pub key: HistoryKey,
    pub leaf: NodeId,
    /// Data error at the protocol's end, before any correction.
    pub residual: PauliOperator,
    /// Some gadget on the path reported a fired flag.
    pub flag_fired: bool,
}

impl FaultScenario {
    fn describe(&self) -> String {
        match self.fault {
            None => format!("no fault -> {} residual {}", self.key, self.residual),
            Some((step, e)) => format!(
                "gadget {step} gate {} {:?} -> {} residual {}",
                e.location, e.kind, self.key, self.residual
            ),
        }
    }
}

/// The fault-free execution plus every single fault in every gadget on the
/// fault-free path. A second-subround gadget is only reached after a first
/// fault, so faults there would make two.
pub fn enumerate_branch_scenarios(tree: &ProtocolTree) -> Vec<FaultScenario> {
    let n = tree.code().n();
    let run = |faults: &mut InjectedFaults| {
        let mut engine = FrameEngine::new(n);
        let w = walk(tree, &mut engine, faults).expect("frame engine does not fail");
        let flag_fired = w.history.iter().any(|h| h.outcome.flag_fired());
        (w, engine.data_error(), flag_fired)
    };
    let (w, residual, flag_fired) = run(&mut InjectedFaults::default());
    let mut out = vec![FaultScenario { fault: None, key: w.key, leaf: w.leaf, residual, flag_fired }];
    let steps = tree.fault_free_path();
    for (step, id) in steps.iter().enumerate() {
        let Node::Measure { step: m, .. } = tree.node(*id) else { continue };
        for e in enumerate_single_faults(m.gadget()) {
            let (w, residual, flag_fired) = run(&mut InjectedFaults(vec![(step, e)]));
            out.push(FaultScenario { fault: Some((step, e)), key: w.key, leaf: w.leaf, residual, flag_fired });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub branch: String,
    pub key: HistoryKey,
    pub scenarios: Vec<FaultScenario>,
    pub reason: String,
}

/// Outcome of lookup-table construction or certification. Fault tolerant
/// iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtReport {
    pub protocol: String,
    pub scenarios: usize,
    pub violations: Vec<Violation>,
}

impl FtReport {
    pub fn is_fault_tolerant(&self) -> bool {
        self.violations.is_empty()
    }

    /// `protocol=.. scenarios=.. violations=.. verdict=FT|NOT-FT`
    pub fn summary(&self) -> String {
        format!(
            "protocol={} scenarios={} violations={} verdict={}",
            self.protocol,
            self.scenarios,
            self.violations.len(),
            if self.is_fault_tolerant() { "FT" } else { "NOT-FT" }
        )
    }
}

impl fmt::Display for FtReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} scenarios, {}", self.protocol, self.scenarios, if self.is_fault_tolerant() { "FT" } else { "NOT FT" })?;
        for v in &self.violations {
            writeln!(f, "  violation at {} history {}: {}", v.branch, v.key, v.reason)?;
            for s in &v.scenarios {
                writeln!(f, "    {}", s.describe())?;
            }
        }
        Ok(())
    }
}

fn branch_name(tree: &ProtocolTree, leaf: NodeId) -> (String, bool) {
    match tree.node(leaf) {
        Node::Leaf { branch, decode } => (branch.clone(), *decode),
        Node::Measure { .. } => unreachable!("scenarios end at leaves"),
    }
}

/// Groups scenarios by leaf and history and picks one correction per group.
///
/// After a fired flag the residuals are propagated errors, which must be
/// corrected exactly: a group holding inequivalent ones is a violation and
/// the entry is the lightest member of their class. Elsewhere the entry is
/// the lightest correction after which the perfect round removes every
/// residual of the group, and a violation is a group with no such correction.
pub fn build_luts(tree: &ProtocolTree) -> Result<Protocol, FtReport> {
    let decoder = PerfectRoundDecoder::new(tree.code());
    let scenarios = enumerate_branch_scenarios(tree);
    let mut groups: BTreeMap<(NodeId, HistoryKey), Vec<&FaultScenario>> = BTreeMap::new();
    for s in &scenarios {
        groups.entry((s.leaf, s.key)).or_default().push(s);
    }
    let mut luts = LutSet::default();
    let mut violations = Vec::new();
    for ((leaf, key), group) in groups {
        let (branch, decode) = branch_name(tree, leaf);
        let residuals: Vec<PauliOperator> = group.iter().map(|s| s.residual).collect();
        if !decode {
            if let Some(bad) = group.iter().find(|s| !decoder.decodes(&s.residual)) {
                violations.push(Violation {
                    branch,
                    key,
                    scenarios: vec![group[0].clone(), (*bad).clone()],
                    reason: "uncorrected branch leaves a logical error".into(),
                });
            }
            continue;
        }
        if group.iter().any(|s| s.flag_fired) {
            let first = group[0];
            match group.iter().find(|s| !tree.code().equivalent(&s.residual, &first.residual)) {
                None => luts.insert(leaf, key, tree.code().min_weight_representative(&first.residual)),
                Some(other) => violations.push(Violation {
                    branch,
                    key,
                    scenarios: vec![first.clone(), (*other).clone()],
                    reason: "inequivalent propagated errors share a history".into(),
                }),
            }
            continue;
        }
        match decoder.common_correction(&residuals) {
            Some(c) => luts.insert(leaf, key, c),
            None => {
                let pair = conflicting_pair(&decoder, &group);
                violations.push(Violation { branch, key, scenarios: pair, reason: "inequivalent residuals share a history".into() });
            }
        }
    }
    if violations.is_empty() {
        fill_unseen(tree, &mut luts);
        Ok(Protocol::new(tree.clone(), luts))
    } else {
        Err(FtReport { protocol: tree.name().to_string(), scenarios: scenarios.len(), violations })
    }
}

/// Histories that no single fault produces still occur under sampled noise.
/// Each gets the lightest error whose bits on the second-subround
/// measurements match the observed ones, or the nearest pattern when no
/// error matches exactly.
fn fill_unseen(tree: &ProtocolTree, luts: &mut LutSet) {
    let mut paulis: Vec<PauliOperator> = all_paulis(tree.code().n()).collect();
    paulis.sort_by(weight_then_lex);
    let mut tables: HashMap<Vec<PauliOperator>, HashMap<u64, PauliOperator>> = HashMap::new();
    let flagged = [(false, false), (true, false), (false, true), (true, true)]
        .map(|(s, f)| GadgetOutcome { syndrome: s, flag: Some(f) });
    let unflagged = [false, true].map(|s| GadgetOutcome { syndrome: s, flag: None });
    let mut stack = vec![(tree.root(), HistoryKey::default(), Vec::new(), 0u64)];
    while let Some((id, key, ops, bits)) = stack.pop() {
        match tree.node(id) {
            Node::Leaf { decode: false, .. } => {}
            Node::Leaf { decode: true, .. } => {
                if luts.get(id, &key).is_some() {
                    continue;
                }
                let table = tables.entry(ops.clone()).or_insert_with(|| {
                    let mut t = HashMap::new();
                    for p in &paulis {
                        t.entry(pattern(p, &ops)).or_insert(*p);
                    }
                    t
                });
                let c = match table.get(&bits) {
                    Some(c) => *c,
                    None => *table
                        .iter()
                        .min_by(|a, b| {
                            (a.0 ^ bits).count_ones().cmp(&(b.0 ^ bits).count_ones()).then(weight_then_lex(a.1, b.1))
                        })
                        .map(|(_, c)| c)
                        .expect("identity is always present"),
                };
                luts.insert(id, key, c);
            }
            Node::Measure { step, edges } => {
                let outcomes: &[GadgetOutcome] = if step.flagged { &flagged } else { &unflagged };
                for &o in outcomes {
                    let mut k = key;
                    k.push_outcome(o);
                    let (mut ops, mut bits) = (ops.clone(), bits);
                    if step.subround == 2 {
                        bits |= (o.syndrome as u64) << ops.len();
                        ops.push(step.stabilizer);
                    }
                    stack.push((edges.next(o), k, ops, bits));
                }
            }
        }
    }
}

fn pattern(e: &PauliOperator, ops: &[PauliOperator]) -> u64 {
    ops.iter().enumerate().fold(0, |acc, (i, m)| acc | ((e.anticommutes_unchecked(m) as u64) << i))
}

fn conflicting_pair(decoder: &PerfectRoundDecoder, group: &[&FaultScenario]) -> Vec<FaultScenario> {
    for (i, a) in group.iter().enumerate() {
        for b in &group[i + 1..] {
            if decoder.common_correction(&[a.residual, b.residual]).is_none() {
                return vec![(*a).clone(), (*b).clone()];
            }
        }
    }
    group.iter().map(|s| (*s).clone()).collect()
}

/// Builds the tables, then replays every single-fault scenario through the
/// protocol with its corrections and a noiseless perfect round. Fault
/// tolerant iff every replay ends in the stabilizer group, and every
/// propagated error is already removed by the table alone.
pub fn certify_fault_tolerance(tree: &ProtocolTree) -> FtReport {
    let protocol = match build_luts(tree) {
        Ok(p) => p,
        Err(report) => return report,
    };
    certify_protocol(&protocol)
}

/// Certification of an already tabulated protocol.
pub fn certify_protocol(protocol: &Protocol) -> FtReport {
    let tree = protocol.tree();
    let decoder = PerfectRoundDecoder::new(tree.code());
    let scenarios = enumerate_branch_scenarios(tree);
    let mut violations = Vec::new();
    for s in &scenarios {
        let faults = s.fault.map(|f| vec![f]).unwrap_or_default();
        let (branch, _) = branch_name(tree, s.leaf);
        match run_protocol(protocol, &mut InjectedFaults(faults), MissPolicy::Strict) {
            Ok(r) if s.flag_fired && tree.code().membership_unchecked(&r.residual).is_none() => violations.push(Violation {
                branch,
                key: s.key,
                scenarios: vec![s.clone()],
                reason: format!("propagated error left as {} after correction {}", r.residual, r.correction),
            }),
            Ok(r) if decoder.decodes(&r.residual) => {}
            Ok(r) => violations.push(Violation {
                branch,
                key: s.key,
                scenarios: vec![s.clone()],
                reason: format!("logical error after correction {} and the perfect round", r.correction),
            }),
            Err(e) => violations.push(Violation { branch, key: s.key, scenarios: vec![s.clone()], reason: e.to_string() }),
        }
    }
    debug_assert!(run_protocol(protocol, &mut NoFaults, MissPolicy::Strict).is_ok());
    FtReport { protocol: tree.name().to_string(), scenarios: scenarios.len(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{code_513, code_steane};
    use crate::gadget::build_flagged_gadget;
    use crate::pauli::pauli;

    fn strings(v: &[PauliOperator]) -> Vec<String> {
        let mut s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        s.sort();
        s
    }

    #[test]
    fn perfect_round_513_is_a_bijection_onto_weight_one() {
        let d = PerfectRoundDecoder::new(&code_513());
        assert_eq!(d.table().len(), 16);
        assert!(d.table()[0].is_identity());
        assert!(d.table()[1..].iter().all(|p| p.weight() == 1));
        let distinct: std::collections::HashSet<_> = d.table().iter().collect();
        assert_eq!(distinct.len(), 16);
    }

    #[test]
    fn perfect_round_steane_fixes_single_qubit_errors() {
        let code = code_steane();
        let d = PerfectRoundDecoder::new(&code);
        assert_eq!(d.table().len(), 64);
        for q in 0..7 {
            for l in [crate::Letter::X, crate::Letter::Y, crate::Letter::Z] {
                assert!(d.decodes(&PauliOperator::single(7, q, l)));
            }
        }
    }

    #[test]
    fn error_sets_match_the_listed_hooks() {
        let code = code_513();
        let g = build_flagged_gadget(&pauli("XZZXI"), 5, 6).unwrap();
        let set = propagated_error_set(&code, &g);
        assert_eq!(strings(&set), strings(&["IIZXI", "IXZXI", "IYZXI", "IZZXI", "IIIXI", "IIXXI", "IIYXI"].map(pauli)));
        assert_eq!(min_syndrome_bits(&set, &code), 3);

        let code = code_steane();
        let g = build_flagged_gadget(&pauli("IIIXXXX"), 7, 8).unwrap();
        let set = propagated_error_set(&code, &g);
        let expect = ["IIIIIXX", "IIIIXXX", "IIIIYXX", "IIIIZXX", "IIIIIIX", "IIIIIYX", "IIIIIZX"].map(pauli);
        assert_eq!(strings(&set), strings(&expect));
    }

    #[test]
    fn syndrome_bit_bound() {
        let code = code_steane();
        assert_eq!(min_syndrome_bits(&[], &code), 0);
        let eight: Vec<_> = ["IIIXIII", "IIIIXII", "IIIIIXI", "IIIIIIX", "IIIZIII", "IIIIZII", "IIIIIZI", "IIIIIIZ"]
            .map(pauli)
            .to_vec();
        assert_eq!(min_syndrome_bits(&eight, &code), 4);
    }

    #[test]
    fn common_correction_prefers_light_classes() {
        let code = code_513();
        let d = PerfectRoundDecoder::new(&code);
        assert_eq!(d.common_correction(&[PauliOperator::identity(5)]), Some(PauliOperator::identity(5)));
        // Logically distinct errors with no shared fix.
        assert_eq!(d.common_correction(&[PauliOperator::identity(5), pauli("XXXXX")]), None);
    }
}
