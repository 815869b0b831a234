//! Adaptive syndrome-extraction protocols as decision graphs.
//!
//! A protocol is a rooted graph of measurement nodes. Flagged nodes branch
//! three ways on their `[s, f]` outcome (trivial, syndrome-only, flag fired);
//! unflagged nodes branch on their single bit, and both edges may point at the
//! same child when the next measurement is unconditional. Leaves are branches
//! of the protocol; a decoding leaf looks up its correction by the full
//! outcome history.

mod builders;

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

pub use builders::{
    protocol_cr18_513, protocol_cr18_steane, protocol_new_513, protocol_new_513_truncated,
    protocol_new_steane_subround2, protocol_new_steane_w6, protocol_new_steane_w6_with, W6Choice,
};

use crate::code::StabilizerCode;
use crate::engine::{Engine, FrameEngine, GadgetOutcome};
use crate::error::{Error, Result};
use crate::gadget::{build_flagged_gadget_with, build_unflagged_gadget, FlagPlacement, Gate, GadgetCircuit};
use crate::noise::{FaultEvent, FaultKind, NoiseModel};
use crate::pauli::PauliOperator;

pub type NodeId = usize;

/// The five shipped protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolName {
    Cr18_513,
    New513,
    Cr18Steane,
    NewSteaneSubround2,
    NewSteaneW6,
}

impl ProtocolName {
    pub const ALL: [ProtocolName; 5] = [
        ProtocolName::Cr18_513,
        ProtocolName::New513,
        ProtocolName::Cr18Steane,
        ProtocolName::NewSteaneSubround2,
        ProtocolName::NewSteaneW6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolName::Cr18_513 => "cr18-513",
            ProtocolName::New513 => "new-513",
            ProtocolName::Cr18Steane => "cr18-steane",
            ProtocolName::NewSteaneSubround2 => "new-steane-subround2",
            ProtocolName::NewSteaneW6 => "new-steane-w6",
        }
    }

    pub fn build(self) -> Result<ProtocolTree> {
        match self {
            ProtocolName::Cr18_513 => protocol_cr18_513(),
            ProtocolName::New513 => protocol_new_513(),
            ProtocolName::Cr18Steane => protocol_cr18_steane(),
            ProtocolName::NewSteaneSubround2 => protocol_new_steane_subround2(),
            ProtocolName::NewSteaneW6 => protocol_new_steane_w6(),
        }
    }
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownProtocol(s.to_string()))
    }
}

/// One stabilizer measurement in the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureStep {
    pub stabilizer: PauliOperator,
    pub flagged: bool,
    /// 1 for the flagged pass, 2 for the follow-up.
    pub subround: u8,
    gadget: GadgetCircuit,
}

impl MeasureStep {
    pub fn gadget(&self) -> &GadgetCircuit {
        &self.gadget
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edges {
    /// `[0,0]`, `[1,0]`, and `f = 1` (both `[0,1]` and `[1,1]`).
    Flagged { trivial: NodeId, syndrome: NodeId, flag: NodeId },
    Unflagged { zero: NodeId, one: NodeId },
}

impl Edges {
    pub fn next(&self, outcome: GadgetOutcome) -> NodeId {
        match *self {
            Edges::Flagged { trivial, syndrome, flag } => {
                if outcome.flag_fired() {
                    flag
                } else if outcome.syndrome {
                    syndrome
                } else {
                    trivial
                }
            }
            Edges::Unflagged { zero, one } => {
                if outcome.syndrome {
                    one
                } else {
                    zero
                }
            }
        }
    }

    fn targets(&self) -> Vec<NodeId> {
        match *self {
            Edges::Flagged { trivial, syndrome, flag } => vec![trivial, syndrome, flag],
            Edges::Unflagged { zero, one } if zero == one => vec![zero],
            Edges::Unflagged { zero, one } => vec![zero, one],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Measure { step: MeasureStep, edges: Edges },
    /// End of a branch. `decode` leaves apply a lookup-table correction.
    Leaf { branch: String, decode: bool },
}

/// Outcome bits along a path, packed little-endian: a flagged node appends
/// `s` then `f`, an unflagged node appends its bit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HistoryKey {
    bits: u64,
    len: u8,
}

impl HistoryKey {
    pub fn push(&mut self, bit: bool) {
        assert!(self.len < 64, "history longer than 64 bits");
        self.bits |= (bit as u64) << self.len;
        self.len += 1;
    }

    pub fn push_outcome(&mut self, out: GadgetOutcome) {
        self.push(out.syndrome);
        if let Some(f) = out.flag {
            self.push(f);
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    /// All bits zero.
    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }

    pub fn parse(s: &str) -> Option<HistoryKey> {
        let mut k = HistoryKey::default();
        for c in s.chars() {
            match c {
                '0' => k.push(false),
                '1' => k.push(true),
                _ => return None,
            }
        }
        Some(k)
    }
}

impl fmt::Display for HistoryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_char(if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A root-to-leaf route through the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSummary {
    pub branch: String,
    pub nodes: Vec<NodeId>,
    pub measurements: usize,
    pub two_qubit_gates: usize,
    pub subround2_gates: usize,
}

#[derive(Debug, Clone)]
pub struct ProtocolTree {
    name: String,
    code: StabilizerCode,
    nodes: Vec<Node>,
    root: NodeId,
}

impl ProtocolTree {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Every root-to-leaf route. Both edges of an unconditional node lead to
    /// the same child and are counted once.
    pub fn paths(&self) -> Vec<PathSummary> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root, Vec::new())];
        while let Some((id, mut route)) = stack.pop() {
            route.push(id);
            match &self.nodes[id] {
                Node::Leaf { branch, .. } => {
                    let steps = route.iter().filter_map(|&n| match &self.nodes[n] {
                        Node::Measure { step, .. } => Some(step),
                        Node::Leaf { .. } => None,
                    });
                    let (mut measurements, mut gates, mut sub2) = (0, 0, 0);
                    for s in steps {
                        measurements += 1;
                        gates += s.gadget.two_qubit_gate_count();
                        if s.subround >= 2 {
                            sub2 += s.gadget.two_qubit_gate_count();
                        }
                    }
                    out.push(PathSummary {
                        branch: branch.clone(),
                        nodes: route,
                        measurements,
                        two_qubit_gates: gates,
                        subround2_gates: sub2,
                    });
                }
                Node::Measure { edges, .. } => {
                    for t in edges.targets().into_iter().rev() {
                        stack.push((t, route.clone()));
                    }
                }
            }
        }
        out
    }

    /// Leaf branch labels in first-visit order.
    pub fn branches(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for p in self.paths() {
            if !seen.contains(&p.branch) {
                seen.push(p.branch);
            }
        }
        seen
    }

    /// Two-qubit gates along the costliest route ending in `branch`.
    pub fn branch_gate_count(&self, branch: &str) -> Result<usize> {
        self.paths()
            .iter()
            .filter(|p| p.branch == branch)
            .map(|p| p.two_qubit_gates)
            .max()
            .ok_or_else(|| Error::UnknownBranch(branch.to_string()))
    }

    /// Second-subround two-qubit gates of the costliest route into `branch`.
    pub fn branch_subround2_gate_count(&self, branch: &str) -> Result<usize> {
        self.paths()
            .iter()
            .filter(|p| p.branch == branch)
            .map(|p| p.subround2_gates)
            .max()
            .ok_or_else(|| Error::UnknownBranch(branch.to_string()))
    }

    /// Nodes visited when nothing goes wrong.
    pub fn fault_free_path(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut id = self.root;
        loop {
            out.push(id);
            match &self.nodes[id] {
                Node::Leaf { .. } => return out,
                Node::Measure { edges, .. } => id = edges.next(GadgetOutcome::default()),
            }
        }
    }

    /// Every measured operator, in node order.
    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Measure { step, .. } => Some(step.stabilizer),
                Node::Leaf { .. } => None,
            })
            .collect()
    }

    /// Same graph with every flagged gadget replaced by its unflagged
    /// version; a flag edge can then never be taken.
    pub fn without_flags(&self) -> ProtocolTree {
        let mut t = self.clone();
        for node in t.nodes.iter_mut() {
            if let Node::Measure { step, edges } = node {
                if let Edges::Flagged { trivial, syndrome, .. } = *edges {
                    step.gadget = step.gadget.without_flag_couplings();
                    step.flagged = false;
                    *edges = Edges::Unflagged { zero: trivial, one: syndrome };
                }
            }
        }
        t.name = format!("{}-unflagged", self.name);
        t
    }

    /// Text listing of nodes and edges.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# protocol {} on {}, root {}", self.name, self.code.name(), self.root);
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Measure { step, edges } => {
                    let kind = if step.flagged { "flagged" } else { "unflagged" };
                    let edges = match edges {
                        Edges::Flagged { trivial, syndrome, flag } => {
                            format!("[0,0]->{trivial} [1,0]->{syndrome} f=1->{flag}")
                        }
                        Edges::Unflagged { zero, one } if zero == one => format!("->{zero}"),
                        Edges::Unflagged { zero, one } => format!("0->{zero} 1->{one}"),
                    };
                    let _ = writeln!(out, "{id}: measure {} {kind} r{} {edges}", step.stabilizer, step.subround);
                }
                Node::Leaf { branch, decode } => {
                    let action = if *decode { "decode" } else { "done" };
                    let _ = writeln!(out, "{id}: leaf {branch} {action}");
                }
            }
        }
        out
    }
}

/// Incremental graph construction used by the protocol constructors.
pub(crate) struct TreeBuilder {
    code: StabilizerCode,
    nodes: Vec<Node>,
    placement: Option<Box<dyn Fn(&PauliOperator) -> FlagPlacement>>,
}

impl TreeBuilder {
    pub(crate) fn new(code: StabilizerCode) -> Self {
        TreeBuilder { code, nodes: Vec::new(), placement: None }
    }

    pub(crate) fn with_placement(mut self, f: impl Fn(&PauliOperator) -> FlagPlacement + 'static) -> Self {
        self.placement = Some(Box::new(f));
        self
    }

    fn check(&self, s: &PauliOperator) -> Result<()> {
        if !self.code.is_plus_one_element(s) {
            return Err(Error::Construction(format!("{s} is not a +1 element of the {} stabilizer group", self.code.name())));
        }
        Ok(())
    }

    pub(crate) fn leaf(&mut self, branch: impl Into<String>, decode: bool) -> NodeId {
        self.nodes.push(Node::Leaf { branch: branch.into(), decode });
        self.nodes.len() - 1
    }

    /// Placeholder replaced later by [`TreeBuilder::set`].
    pub(crate) fn reserve(&mut self) -> NodeId {
        self.leaf("<reserved>", false)
    }

    pub(crate) fn set_flagged(&mut self, id: NodeId, s: &PauliOperator, edges: Edges) -> Result<()> {
        self.check(s)?;
        let n = self.code.n();
        let placement = self.placement.as_ref().map_or_else(|| FlagPlacement::standard(s.weight()), |f| f(s));
        let gadget = build_flagged_gadget_with(s, n, n + 1, placement)?;
        self.nodes[id] = Node::Measure { step: MeasureStep { stabilizer: *s, flagged: true, subround: 1, gadget }, edges };
        Ok(())
    }

    pub(crate) fn unflagged(&mut self, s: &PauliOperator, subround: u8, edges: Edges) -> Result<NodeId> {
        self.check(s)?;
        let gadget = build_unflagged_gadget(s, self.code.n())?;
        self.nodes.push(Node::Measure { step: MeasureStep { stabilizer: *s, flagged: false, subround, gadget }, edges });
        Ok(self.nodes.len() - 1)
    }

    /// Unconditional chain of unflagged measurements ending in `then`.
    pub(crate) fn chain(&mut self, ops: &[PauliOperator], then: NodeId) -> Result<NodeId> {
        let mut next = then;
        for s in ops.iter().rev() {
            next = self.unflagged(s, 2, Edges::Unflagged { zero: next, one: next })?;
        }
        Ok(next)
    }

    pub(crate) fn finish(self, name: impl Into<String>, root: NodeId) -> ProtocolTree {
        assert!(
            self.nodes.iter().all(|n| !matches!(n, Node::Leaf { branch, .. } if branch == "<reserved>")),
            "unfilled node"
        );
        ProtocolTree { name: name.into(), code: self.code, nodes: self.nodes, root }
    }
}

/// Supplies faults to a protocol run: asked once per gate of each executed
/// gadget, `step` counting gadgets in execution order.
pub trait FaultSource {
    fn fault_at(&mut self, step: usize, location: usize, gate: &Gate) -> Option<FaultKind>;
}

/// Noiseless execution.
pub struct NoFaults;

impl FaultSource for NoFaults {
    fn fault_at(&mut self, _: usize, _: usize, _: &Gate) -> Option<FaultKind> {
        None
    }
}

/// Explicit faults as `(step, event)` pairs.
#[derive(Debug, Clone, Default)]
pub struct InjectedFaults(pub Vec<(usize, FaultEvent)>);

impl FaultSource for InjectedFaults {
    fn fault_at(&mut self, step: usize, location: usize, _: &Gate) -> Option<FaultKind> {
        self.0.iter().find(|(s, e)| *s == step && e.location == location).map(|(_, e)| e.kind)
    }
}

/// Circuit-level depolarizing noise drawn from `rng`.
pub struct SampledFaults<'a, R> {
    pub model: &'a NoiseModel,
    pub rng: &'a mut R,
}

impl<R: rand::Rng> FaultSource for SampledFaults<'_, R> {
    #[inline]
    fn fault_at(&mut self, _: usize, location: usize, gate: &Gate) -> Option<FaultKind> {
        self.model.sample_gate(location, gate, self.rng).map(|e| e.kind)
    }
}

/// One visited measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryEntry {
    pub node: NodeId,
    pub outcome: GadgetOutcome,
}

/// Where a walk ended, before any correction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub history: Vec<HistoryEntry>,
    pub key: HistoryKey,
    pub leaf: NodeId,
}

/// Walks `tree` on `engine`, measuring as directed and stopping at a leaf.
pub fn walk<E: Engine, F: FaultSource>(tree: &ProtocolTree, engine: &mut E, faults: &mut F) -> Result<Walk> {
    let mut id = tree.root;
    let mut history = Vec::new();
    let mut key = HistoryKey::default();
    loop {
        match &tree.nodes[id] {
            Node::Leaf { .. } => return Ok(Walk { history, key, leaf: id }),
            Node::Measure { step, edges } => {
                let n = history.len();
                let outcome = engine.run_gadget(&step.gadget, |loc, g| faults.fault_at(n, loc, g))?;
                history.push(HistoryEntry { node: id, outcome });
                key.push_outcome(outcome);
                id = edges.next(outcome);
            }
        }
    }
}

/// Same as [`walk`] without the per-node history, for the Monte Carlo path.
#[inline]
pub(crate) fn walk_key<E: Engine, F: FaultSource>(tree: &ProtocolTree, engine: &mut E, faults: &mut F) -> Result<(HistoryKey, NodeId)> {
    let mut id = tree.root;
    let mut key = HistoryKey::default();
    let mut n = 0;
    loop {
        match &tree.nodes[id] {
            Node::Leaf { .. } => return Ok((key, id)),
            Node::Measure { step, edges } => {
                let outcome = engine.run_gadget(&step.gadget, |loc, g| faults.fault_at(n, loc, g))?;
                n += 1;
                key.push_outcome(outcome);
                id = edges.next(outcome);
            }
        }
    }
}

/// Corrections per decoding leaf, keyed by outcome history.
#[derive(Debug, Clone, Default)]
pub struct LutSet {
    tables: BTreeMap<NodeId, HashMap<HistoryKey, PauliOperator>>,
}

/// What to do when a decoding leaf meets a history it has no entry for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissPolicy {
    /// Report [`Error::LutMiss`].
    Strict,
    /// Apply no correction and leave the history to the perfect round.
    Identity,
}

impl LutSet {
    pub fn insert(&mut self, leaf: NodeId, key: HistoryKey, correction: PauliOperator) {
        self.tables.entry(leaf).or_default().insert(key, correction);
    }

    pub fn get(&self, leaf: NodeId, key: &HistoryKey) -> Option<&PauliOperator> {
        self.tables.get(&leaf).and_then(|t| t.get(key))
    }

    pub fn tables(&self) -> &BTreeMap<NodeId, HashMap<HistoryKey, PauliOperator>> {
        &self.tables
    }

    pub fn len(&self) -> usize {
        self.tables.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A protocol graph together with its certified lookup tables.
#[derive(Debug, Clone)]
pub struct Protocol {
    tree: ProtocolTree,
    luts: LutSet,
}

/// Result of one protocol execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolRunResult {
    pub history: Vec<HistoryEntry>,
    pub key: HistoryKey,
    pub branch: String,
    pub correction: PauliOperator,
    /// Data error left after the correction (frame engine only).
    pub residual: PauliOperator,
}

impl Protocol {
    pub fn new(tree: ProtocolTree, luts: LutSet) -> Self {
        Protocol { tree, luts }
    }

    /// Builds a shipped protocol and derives its tables. Fails if the tables
    /// are not fault tolerant.
    pub fn shipped(name: ProtocolName) -> Result<Self> {
        let tree = name.build()?;
        crate::synthesis::build_luts(&tree).map_err(|report| {
            Error::Construction(format!("{name}: {} lookup-table violations", report.violations.len()))
        })
    }

    pub fn tree(&self) -> &ProtocolTree {
        &self.tree
    }

    pub fn luts(&self) -> &LutSet {
        &self.luts
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.tree.code
    }

    /// Correction for a finished walk.
    pub fn correction(&self, leaf: NodeId, key: &HistoryKey, policy: MissPolicy) -> Result<PauliOperator> {
        let Node::Leaf { branch, decode } = &self.tree.nodes[leaf] else {
            unreachable!("walks end at leaves");
        };
        let identity = PauliOperator::identity(self.tree.code.n());
        if !decode {
            return Ok(identity);
        }
        match (self.luts.get(leaf, key), policy) {
            (Some(c), _) => Ok(*c),
            (None, MissPolicy::Identity) => Ok(identity),
            (None, MissPolicy::Strict) => Err(Error::LutMiss { branch: branch.clone(), history: key.to_string() }),
        }
    }

    /// Walks the protocol on `engine` and applies the lookup-table correction.
    pub fn execute<E: Engine, F: FaultSource>(
        &self,
        engine: &mut E,
        faults: &mut F,
        policy: MissPolicy,
    ) -> Result<(Walk, PauliOperator)> {
        let w = walk(&self.tree, engine, faults)?;
        let c = self.correction(w.leaf, &w.key, policy)?;
        engine.apply_data_pauli(&c);
        Ok((w, c))
    }

    pub fn branch_of(&self, leaf: NodeId) -> &str {
        match &self.tree.nodes[leaf] {
            Node::Leaf { branch, .. } => branch,
            Node::Measure { .. } => "<inner>",
        }
    }

    /// `lut` dump: `branch<TAB>history<TAB>correction`, one entry per line,
    /// sorted by branch order then history.
    pub fn lut_dump(&self) -> String {
        let mut out = String::new();
        for (leaf, table) in &self.luts.tables {
            let mut entries: Vec<_> = table.iter().collect();
            entries.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.to_string().cmp(&b.0.to_string())));
            for (key, c) in entries {
                let _ = writeln!(out, "{}\t{}\t{}", self.branch_of(*leaf), key, c);
            }
        }
        out
    }
}

/// Runs `protocol` on a fresh frame engine holding a codeword.
pub fn run_protocol<F: FaultSource>(protocol: &Protocol, faults: &mut F, policy: MissPolicy) -> Result<ProtocolRunResult> {
    let mut engine = FrameEngine::new(protocol.code().n());
    let (w, correction) = protocol.execute(&mut engine, faults, policy)?;
    Ok(ProtocolRunResult {
        branch: protocol.branch_of(w.leaf).to_string(),
        history: w.history,
        key: w.key,
        correction,
        residual: engine.data_error(),
    })
}
