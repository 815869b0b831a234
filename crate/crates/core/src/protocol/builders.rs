//! Constructors for the shipped protocol graphs.

use crate::code::{code_513, code_steane};
use crate::error::Result;
use crate::gadget::FlagPlacement;
use crate::pauli::PauliOperator;
use crate::synthesis::{self, Completion, Level};

use super::{Edges, NodeId, ProtocolTree, TreeBuilder};

/// Chosen first-subround triple for the weight-6 Steane protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct W6Choice {
    pub triple: [PauliOperator; 3],
    pub placement: FlagPlacement,
}

/// Builds the flagged first subround back to front. `trigger(b, i)` returns
/// the `(syndrome, flag)` children of flagged node `i`.
fn first_subround(
    b: &mut TreeBuilder,
    ops: &[PauliOperator],
    mut trigger: impl FnMut(&mut TreeBuilder, usize) -> Result<(NodeId, NodeId)>,
) -> Result<NodeId> {
    let mut next = b.leaf("trivial", false);
    for (i, s) in ops.iter().enumerate().rev() {
        let id = b.reserve();
        let (syndrome, flag) = trigger(b, i)?;
        b.set_flagged(id, s, Edges::Flagged { trivial: next, syndrome, flag })?;
        next = id;
    }
    Ok(next)
}

/// Unflagged measurements `prefix` followed by `completion`, all ending in
/// `leaf`. A measurement whose bit steers a later choice gets two children.
pub(crate) fn sequence(b: &mut TreeBuilder, prefix: &[PauliOperator], completion: &Completion, leaf: NodeId) -> Result<NodeId> {
    fn build(
        b: &mut TreeBuilder,
        prefix: &[PauliOperator],
        levels: &[Level],
        pos: usize,
        known: &mut Vec<Option<bool>>,
        leaf: NodeId,
    ) -> Result<NodeId> {
        let total = prefix.len() + levels.len();
        if pos == total {
            return Ok(leaf);
        }
        let op = if pos < prefix.len() {
            prefix[pos]
        } else {
            match levels[pos - prefix.len()] {
                Level::Fixed(m) => m,
                Level::Conditional { on, zero, one } => {
                    if known[on].expect("condition on an earlier measurement") {
                        one
                    } else {
                        zero
                    }
                }
            }
        };
        let steers = levels.iter().any(|l| matches!(l, Level::Conditional { on, .. } if *on == pos));
        let edges = if steers {
            known.push(Some(false));
            let zero = build(b, prefix, levels, pos + 1, known, leaf)?;
            known.pop();
            known.push(Some(true));
            let one = build(b, prefix, levels, pos + 1, known, leaf)?;
            known.pop();
            Edges::Unflagged { zero, one }
        } else {
            known.push(None);
            let next = build(b, prefix, levels, pos + 1, known, leaf)?;
            known.pop();
            Edges::Unflagged { zero: next, one: next }
        };
        b.unflagged(&op, 2, edges)
    }
    build(b, prefix, &completion.levels, 0, &mut Vec::new(), leaf)
}

fn label(i: usize) -> String {
    format!("g{}", i + 1)
}

fn cr18(code: crate::code::StabilizerCode, name: &str) -> Result<ProtocolTree> {
    let gens = code.generators().to_vec();
    let mut b = TreeBuilder::new(code);
    let root = first_subround(&mut b, &gens, |b, i| {
        let s_leaf = b.leaf(format!("{}-syndrome", label(i)), true);
        let syndrome = b.chain(&gens, s_leaf)?;
        let f_leaf = b.leaf(format!("{}-flag", label(i)), true);
        let flag = b.chain(&gens, f_leaf)?;
        Ok((syndrome, flag))
    })?;
    Ok(b.finish(name, root))
}

/// Flagged `g1..g4`; any nontrivial outcome re-measures all four unflagged.
pub fn protocol_cr18_513() -> Result<ProtocolTree> {
    cr18(code_513(), "cr18-513")
}

/// Flagged `X1 X2 X3 Z1 Z2 Z3`; any nontrivial outcome re-measures all six.
pub fn protocol_cr18_steane() -> Result<ProtocolTree> {
    cr18(code_steane(), "cr18-steane")
}

fn new_513(closers: bool, name: &str) -> Result<ProtocolTree> {
    let code = code_513();
    let gens = code.generators().to_vec();
    let completions = synthesis::five_qubit_flag_completions()?;
    let mut b = TreeBuilder::new(code);
    let root = first_subround(&mut b, &gens, |b, i| {
        let s_leaf = b.leaf(format!("{}-syndrome", label(i)), true);
        let syndrome = b.chain(&gens, s_leaf)?;
        let f_leaf = b.leaf(format!("{}-flag", label(i)), true);
        let mut c = completions[i].clone();
        if !closers {
            c.levels.truncate(1);
        }
        let flag = sequence(b, &[gens[i]], &c, f_leaf)?;
        Ok((syndrome, flag))
    })?;
    Ok(b.finish(name, root))
}

/// `cr18-513` with a shorter flag branch: the generator again, then two
/// more measurements. For `g1` these are the same-support partner `YXXYI`
/// and a closer picked by its bit.
pub fn protocol_new_513() -> Result<ProtocolTree> {
    new_513(true, "new-513")
}

/// `new-513` without the last flag-branch measurement. Not fault tolerant.
pub fn protocol_new_513_truncated() -> Result<ProtocolTree> {
    new_513(false, "new-513-truncated")
}

/// Steane protocol with shortened second subrounds: a fired flag measures
/// `g`, its X/Z conjugate, and a searched conditional third; a syndrome-only
/// trigger measures the three generators of the same type plus `conj(g)`.
pub fn protocol_new_steane_subround2() -> Result<ProtocolTree> {
    let code = code_steane();
    let gens = code.generators().to_vec();
    let xs = code.x_type_generators();
    let zs = code.z_type_generators();
    let completions = synthesis::steane_flag_completions()?;
    let mut b = TreeBuilder::new(code);
    let root = first_subround(&mut b, &gens, |b, i| {
        let g = gens[i];
        let same_type = if g.z_bits() == 0 { &xs } else { &zs };
        let mut s_ops = same_type.clone();
        s_ops.push(g.conjugate_xz());
        let s_leaf = b.leaf(format!("{}-syndrome", label(i)), true);
        let syndrome = b.chain(&s_ops, s_leaf)?;
        let f_leaf = b.leaf(format!("{}-flag", label(i)), true);
        let flag = sequence(b, &[g, g.conjugate_xz()], &completions[i], f_leaf)?;
        Ok((syndrome, flag))
    })?;
    Ok(b.finish("new-steane-subround2", root))
}

/// Three flagged weight-6 elements, then all six generators unflagged on
/// any nontrivial outcome.
pub fn protocol_new_steane_w6_with(choice: &W6Choice) -> Result<ProtocolTree> {
    let code = code_steane();
    let gens = code.generators().to_vec();
    let placement = choice.placement;
    let mut b = TreeBuilder::new(code).with_placement(move |_| placement);
    let root = first_subround(&mut b, &choice.triple, |b, i| {
        let s_leaf = b.leaf(format!("w{}-syndrome", i + 1), true);
        let syndrome = b.chain(&gens, s_leaf)?;
        let f_leaf = b.leaf(format!("w{}-flag", i + 1), true);
        let flag = b.chain(&gens, f_leaf)?;
        Ok((syndrome, flag))
    })?;
    Ok(b.finish("new-steane-w6", root))
}

/// The weight-6 protocol with the first certified triple.
pub fn protocol_new_steane_w6() -> Result<ProtocolTree> {
    protocol_new_steane_w6_with(&synthesis::w6_choice()?)
}
