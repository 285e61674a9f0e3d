//! Link-free higher-order pushdown automata: the collapse-free simulation of
//! a scheme's CPDA, lockstep comparison against it, a text format, and the
//! translation of a PDA back into a safe scheme.

mod format;
mod hors;
mod lockstep;

use std::collections::{BTreeMap, HashMap};
use std::ops::Deref;

use crate::comptree::{check_incremental_binding_static, CompGraph};
use crate::cpda::{Machine, Op, State, Transition};
use crate::error::{Error, Result};
use crate::hostack::{StackSymbol, Sym, SymbolInfo};

pub use format::parse_pda;
pub use hors::{kappa_type, pda_to_hors, roundtrip_safe_scheme, roundtrip_safe_scheme_with};
pub use lockstep::{lockstep_check, LockstepReport};

/// A machine whose symbols carry no links and whose transitions never
/// collapse.
#[derive(Debug, Clone)]
pub struct PdaMachine(Machine);

impl Deref for PdaMachine {
    type Target = Machine;

    fn deref(&self) -> &Machine {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeriveOptions {
    /// Replace every collapse by `pop_{n-ord+1}`, prime lambdas included.
    pub uniform: bool,
    /// Build the machine even when the scheme is not incrementally bound.
    pub force: bool,
}

impl PdaMachine {
    pub fn new(m: Machine) -> Result<Self> {
        let linked = |op: &Op| match op {
            Op::Collapse => true,
            Op::Push1(s) => s.link.is_some(),
            Op::PushChild { link, .. } => link.is_some(),
            _ => false,
        };
        for t in m.delta.values() {
            let bad = match t {
                Transition::Ops(ops, _) => ops.iter().any(linked),
                Transition::Output { succs, .. } => succs.iter().flat_map(|(o, _)| o).any(linked),
            };
            if bad {
                return Err(Error::Machine("pushdown automata neither collapse nor create links".into()));
            }
        }
        if m.initial.stack.erase_links() != m.initial.stack {
            return Err(Error::Machine("initial stack carries links".into()));
        }
        Ok(PdaMachine(m))
    }

    pub fn machine(&self) -> &Machine {
        &self.0
    }

    /// Every transition a single static operation, outputs moving straight
    /// to their successor states.
    pub fn is_normalized(&self) -> bool {
        self.0.delta.values().all(|t| match t {
            Transition::Ops(ops, _) => {
                ops.len() == 1 && matches!(ops[0], Op::Push1(_) | Op::Push(_) | Op::Pop(_))
            }
            Transition::Output { succs, .. } => succs.iter().all(|(o, _)| o.is_empty()),
        })
    }

    /// Equivalent machine in which each transition performs one static
    /// operation. Multi-step transitions are threaded through fresh states,
    /// shared between transitions with the same remaining instructions.
    pub fn normalize(&self) -> Result<PdaMachine> {
        let m = &self.0;
        let mut out = m.clone();
        out.delta = BTreeMap::new();
        let mut chains = Chains::default();
        for (&(p, a), t) in &m.delta {
            match t {
                Transition::Ops(ops, q) => {
                    let Some(&first) = ops.first() else {
                        return Err(Error::Machine(format!("transition of state {} performs no operation", p)));
                    };
                    if let Some(op) = self.resolve(first, a) {
                        let next = chains.target(&mut out.states, &ops[1..], *q);
                        out.delta.insert((p, a), Transition::Ops(vec![op], next));
                    }
                }
                Transition::Output { terminal, succs } => {
                    let succs = succs
                        .iter()
                        .map(|(ops, q)| (Vec::new(), chains.target(&mut out.states, ops, *q)))
                        .collect();
                    out.delta.insert(
                        (p, a),
                        Transition::Output {
                            terminal: *terminal,
                            succs,
                        },
                    );
                }
            }
        }
        let tops: Vec<Option<Sym>> = std::iter::once(None).chain(m.table.symbols().map(Some)).collect();
        while let Some((s, ops, q)) = chains.pending.pop() {
            for &b in &tops {
                if let Some(op) = self.resolve(ops[0], b) {
                    let next = chains.target(&mut out.states, &ops[1..], q);
                    out.delta.insert((s, b), Transition::Ops(vec![op], next));
                }
            }
        }
        Ok(PdaMachine(out))
    }

    /// The static operation `op` amounts to when the top symbol is `top`;
    /// `None` where it is undefined.
    fn resolve(&self, op: Op, top: Option<Sym>) -> Option<Op> {
        let m = &self.0;
        match op {
            Op::Push1(_) | Op::Push(_) | Op::Pop(_) => Some(op),
            Op::PushChild { index, .. } => {
                m.child(top?, index).map(|c| Op::Push1(StackSymbol::plain(c)))
            }
            Op::PopForCollapse { uniform } => {
                let top = top?;
                if !m.table.is_lambda(top) {
                    return None;
                }
                if m.table.is_prime(top) && !uniform {
                    return Some(Op::Pop(1));
                }
                let j = (m.order + 1).checked_sub(m.table.order(top))?;
                (1..=m.order).contains(&j).then_some(Op::Pop(j))
            }
            Op::Collapse => None,
        }
    }
}

#[derive(Default)]
struct Chains {
    states: HashMap<(Vec<Op>, State), State>,
    pending: Vec<(State, Vec<Op>, State)>,
}

impl Chains {
    /// State that performs `rest` and then continues in `q`.
    fn target(&mut self, names: &mut Vec<String>, rest: &[Op], q: State) -> State {
        if rest.is_empty() {
            return q;
        }
        let key = (rest.to_vec(), q);
        if let Some(&s) = self.states.get(&key) {
            return s;
        }
        let s = names.len();
        names.push(format!("t{}", s));
        self.states.insert(key, s);
        self.pending.push((s, rest.to_vec(), q));
        s
    }
}

/// The pushdown automaton simulating the CPDA of `g`: every collapse becomes
/// `pop_1` at a prime lambda and `pop_{n-ord+1}` elsewhere, and no link is
/// ever created.
pub fn derive_pda(cpda: &Machine, g: &CompGraph, opts: DeriveOptions) -> Result<PdaMachine> {
    if !opts.force {
        let v = check_incremental_binding_static(g);
        if !v.is_empty() {
            return Err(Error::NotIncrementallyBound(v.len()));
        }
    }
    let strip = |op: &Op| match *op {
        Op::Collapse => Op::PopForCollapse { uniform: opts.uniform },
        Op::Push1(s) => Op::Push1(StackSymbol::plain(s.sym)),
        Op::PushChild { index, .. } => Op::PushChild { index, link: None },
        other => other,
    };
    let mut m = cpda.clone();
    for t in m.delta.values_mut() {
        match t {
            Transition::Ops(ops, _) => ops.iter_mut().for_each(|o| *o = strip(o)),
            Transition::Output { succs, .. } => succs
                .iter_mut()
                .for_each(|(ops, _)| ops.iter_mut().for_each(|o| *o = strip(o))),
        }
    }
    m.initial.stack = m.initial.stack.erase_links();
    PdaMachine::new(m)
}

#[cfg(test)]
mod tests;
