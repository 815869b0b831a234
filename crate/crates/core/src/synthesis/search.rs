//! Constrained searches for measurement choices the protocols leave open.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::code::{code_513, code_steane, StabilizerCode};
use crate::error::{Error, Result};
use crate::gadget::{build_flagged_gadget_with, FlagPlacement};
use crate::pauli::{pauli, weight_then_lex, PauliOperator};
use crate::protocol::{protocol_new_steane_w6_with, W6Choice};

use super::{certify_fault_tolerance, propagated_error_set};

/// One measurement appended after a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fixed(PauliOperator),
    /// Measure `zero` or `one` depending on the bit of measurement `on`
    /// (counted over prefix and levels together).
    Conditional { on: usize, zero: PauliOperator, one: PauliOperator },
}

impl Level {
    fn weight(&self) -> usize {
        match self {
            Level::Fixed(m) => m.weight(),
            Level::Conditional { zero, one, .. } => zero.weight().max(one.weight()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Completion {
    pub levels: Vec<Level>,
}

impl Completion {
    pub fn total_weight(&self) -> usize {
        self.levels.iter().map(Level::weight).sum()
    }
}

/// Input to [`search_completion`]: the errors reaching the branch must end
/// with distinct outcome patterns unless they are equivalent. The identity
/// stands for a measurement error and keeps the all-zero pattern.
#[derive(Debug, Clone)]
pub struct SearchConstraints<'a> {
    pub code: &'a StabilizerCode,
    pub prefix: Vec<PauliOperator>,
    pub pool: Vec<PauliOperator>,
    pub errors: Vec<PauliOperator>,
    pub max_levels: usize,
}

/// Identity plus the propagated-error set of the flagged gadget for `s`.
pub fn flag_branch_errors(code: &StabilizerCode, s: &PauliOperator, placement: FlagPlacement) -> Result<Vec<PauliOperator>> {
    let n = code.n();
    let g = build_flagged_gadget_with(s, n, n + 1, placement)?;
    let mut out = vec![PauliOperator::identity(n)];
    out.extend(propagated_error_set(code, &g));
    Ok(out)
}

fn pattern(prefix: &[PauliOperator], levels: &[Level], e: &PauliOperator) -> u64 {
    let mut bits = 0u64;
    for (i, m) in prefix.iter().enumerate() {
        bits |= (e.anticommutes_unchecked(m) as u64) << i;
    }
    for (j, l) in levels.iter().enumerate() {
        let m = match *l {
            Level::Fixed(m) => m,
            Level::Conditional { on, zero, one } => {
                if (bits >> on) & 1 == 1 {
                    one
                } else {
                    zero
                }
            }
        };
        bits |= (e.anticommutes_unchecked(&m) as u64) << (prefix.len() + j);
    }
    bits
}

fn separates(c: &SearchConstraints, levels: &[Level]) -> bool {
    let mut seen: HashMap<u64, PauliOperator> = HashMap::new();
    c.errors.iter().all(|e| {
        let rep = seen.entry(pattern(&c.prefix, levels, e)).or_insert(*e);
        c.code.equivalent(rep, e)
    })
}

/// Candidates for level `j`: fixed measurements first, then conditional
/// pairs on equal supports, then any other pair; conditions on earlier
/// measurements are tried first.
fn level_candidates(pool: &[PauliOperator], earlier: usize) -> Vec<Level> {
    let mut out: Vec<Level> = pool.iter().map(|m| Level::Fixed(*m)).collect();
    for same_support in [true, false] {
        for on in 0..earlier {
            for a in pool {
                for b in pool {
                    if a != b && (a.support_mask() == b.support_mask()) == same_support {
                        out.push(Level::Conditional { on, zero: *a, one: *b });
                    }
                }
            }
        }
    }
    out
}

/// Shortest completion of the prefix that separates every inequivalent
/// error, then lightest, then first in candidate order.
pub fn search_completion(c: &SearchConstraints) -> Result<Completion> {
    let mut pool = c.pool.clone();
    pool.sort_by(weight_then_lex);
    pool.dedup();
    for len in 0..=c.max_levels {
        let mut best: Option<Completion> = None;
        let mut levels = Vec::with_capacity(len);
        dfs(c, &pool, len, &mut levels, &mut best);
        if let Some(b) = best {
            return Ok(b);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no completion of {} measurements with up to {} more",
        c.prefix.len(),
        c.max_levels
    )))
}

fn dfs(
    c: &SearchConstraints,
    pool: &[PauliOperator],
    len: usize,
    levels: &mut Vec<Level>,
    best: &mut Option<Completion>,
) {
    if levels.len() == len {
        let w: usize = levels.iter().map(Level::weight).sum();
        if best.as_ref().is_some_and(|b| b.total_weight() <= w) {
            return;
        }
        if separates(c, levels) {
            *best = Some(Completion { levels: levels.clone() });
        }
        return;
    }
    for l in level_candidates(pool, c.prefix.len() + levels.len()) {
        levels.push(l);
        dfs(c, pool, len, levels, best);
        levels.pop();
    }
}

/// Flag-branch completions for each Steane generator, prefix `[g, conj(g)]`,
/// drawn from the generators.
pub fn steane_flag_completions() -> Result<Vec<Completion>> {
    static CACHE: OnceLock<Result<Vec<Completion>>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let code = code_steane();
            code.generators()
                .iter()
                .map(|g| {
                    let errors = flag_branch_errors(&code, g, FlagPlacement::standard(g.weight()))?;
                    search_completion(&SearchConstraints {
                        code: &code,
                        prefix: vec![*g, g.conjugate_xz()],
                        pool: code.generators().to_vec(),
                        errors,
                        max_levels: 2,
                    })
                })
                .collect()
        })
        .clone()
}

/// Flag-branch completions for each [[5,1,3]] generator after measuring it
/// again unflagged. The `g1` instance and its cyclic shifts are used where
/// they separate the propagated errors; otherwise the full group is searched.
pub fn five_qubit_flag_completions() -> Result<Vec<Completion>> {
    static CACHE: OnceLock<Result<Vec<Completion>>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let code = code_513();
            let pool: Vec<PauliOperator> = code.group_elements().into_iter().filter(|p| !p.is_identity()).collect();
            code.generators()
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let c = SearchConstraints {
                        code: &code,
                        prefix: vec![*g],
                        pool: pool.clone(),
                        errors: flag_branch_errors(&code, g, FlagPlacement::standard(g.weight()))?,
                        max_levels: 2,
                    };
                    let shifted = Completion {
                        levels: vec![
                            Level::Fixed(pauli("YXXYI").cyclic_shift(i)),
                            Level::Conditional {
                                on: 1,
                                zero: pauli("ZIZYY").cyclic_shift(i),
                                one: pauli("XIXZZ").cyclic_shift(i),
                            },
                        ],
                    };
                    if separates(&c, &shifted.levels) {
                        Ok(shifted)
                    } else {
                        search_completion(&c)
                    }
                })
                .collect()
        })
        .clone()
}

/// Every qubit carries at least two distinct non-identity letters across
/// the three operators.
fn covers(triple: &[PauliOperator; 3]) -> bool {
    (0..triple[0].num_qubits()).all(|q| {
        let mut seen: Vec<crate::pauli::Letter> = triple.iter().map(|p| p.letter(q)).filter(|l| *l != crate::pauli::Letter::I).collect();
        seen.sort();
        seen.dedup();
        seen.len() >= 2
    })
}

/// First certified weight-6 triple. Flag placements are widened before the
/// operator pool.
pub fn search_w6_choice() -> Result<W6Choice> {
    let code = code_steane();
    let mut pool: Vec<PauliOperator> = code.group_elements().into_iter().filter(|p| p.weight() == 6).collect();
    pool.sort_by(weight_then_lex);
    let mut placements = vec![FlagPlacement::standard(6)];
    for open_after in 0..6 {
        for close_before in open_after + 1..6 {
            let p = FlagPlacement { open_after, close_before };
            if !placements.contains(&p) {
                placements.push(p);
            }
        }
    }
    for placement in placements {
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                for k in j + 1..pool.len() {
                    let triple = [pool[i], pool[j], pool[k]];
                    if !covers(&triple) {
                        continue;
                    }
                    let choice = W6Choice { triple, placement };
                    let tree = protocol_new_steane_w6_with(&choice)?;
                    if certify_fault_tolerance(&tree).is_fault_tolerant() {
                        return Ok(choice);
                    }
                }
            }
        }
    }
    Err(Error::SearchExhausted("no fault-tolerant weight-6 triple".into()))
}

/// Cached [`search_w6_choice`].
pub fn w6_choice() -> Result<W6Choice> {
    static CACHE: OnceLock<Result<W6Choice>> = OnceLock::new();
    CACHE.get_or_init(search_w6_choice).clone()
}

fn write_levels(out: &mut String, c: &Completion) {
    for l in &c.levels {
        let _ = match l {
            Level::Fixed(m) => write!(out, ", {m}"),
            Level::Conditional { on, zero, one } => write!(out, ", (bit {} = 0 ? {zero} : {one})", on + 1),
        };
    }
    out.push('\n');
}

/// Text record of every searched choice in the shipped protocols.
pub fn provenance() -> Result<String> {
    let mut out = String::from("# searched protocol choices\n");
    let five = code_513();
    for (g, c) in five.generators().iter().zip(five_qubit_flag_completions()?) {
        let _ = write!(out, "new-513 flag branch {g}: {g}");
        write_levels(&mut out, &c);
    }
    let code = code_steane();
    for (g, c) in code.generators().iter().zip(steane_flag_completions()?) {
        let _ = write!(out, "new-steane-subround2 flag branch {g}: {g}, {}", g.conjugate_xz());
        write_levels(&mut out, &c);
    }
    let w6 = w6_choice()?;
    let _ = writeln!(
        out,
        "new-steane-w6 triple: {} {} {}; flag coupled after data gate {} and before data gate {}",
        w6.triple[0], w6.triple[1], w6.triple[2], w6.placement.open_after + 1, w6.placement.close_before + 1
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steane_g1_completion_is_conditional_pair() {
        let c = &steane_flag_completions().unwrap()[0];
        assert_eq!(
            c.levels,
            vec![Level::Conditional { on: 0, zero: pauli("ZIZIZIZ"), one: pauli("XIXIXIX") }]
        );
    }

    #[test]
    fn covering_filter() {
        let t = [pauli("XXXXXXI"), pauli("XXXXXXI"), pauli("ZZZZZZI")];
        assert!(!covers(&t));
    }
}
