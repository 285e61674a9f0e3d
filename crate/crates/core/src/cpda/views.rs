use serde::Serialize;

use crate::comptree::{CompGraph, NodeKind};
use crate::hostack::{HoStack, StackSymbol, Sym, SymbolInfo};

use super::{Configuration, Machine, Op, Transition};

/// The P-view: the top 1-stack, bottom first.
pub fn pview(c: &Configuration) -> Vec<Sym> {
    c.stack.top_symbols().iter().map(|s| s.sym).collect()
}

fn oview_impl(c: &Configuration, g: &CompGraph, stop_at_app: bool) -> Vec<Sym> {
    let mut out = Vec::new();
    let mut s: HoStack = c.stack.clone();
    while let Ok(top) = s.top1() {
        out.push(top.sym);
        if g.is_lambda(top.sym) {
            match s.collapse() {
                Ok(t) => s = t,
                Err(_) => break,
            }
        } else {
            if stop_at_app && g.node(top.sym.into()).kind == NodeKind::App {
                break;
            }
            match s.pop(1) {
                Ok(t) => s = t,
                Err(_) => break,
            }
        }
    }
    out.reverse();
    out
}

/// The long O-view: variables, terminals and `@` nodes step down by `pop_1`,
/// lambdas follow their link. Ends at an empty 1-stack or at a lambda that
/// cannot collapse.
pub fn long_oview(c: &Configuration, g: &CompGraph) -> Vec<Sym> {
    oview_impl(c, g, false)
}

/// The O-view: the long O-view cut at the first `@` node.
pub fn oview(c: &Configuration, g: &CompGraph) -> Vec<Sym> {
    oview_impl(c, g, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub node: Sym,
    /// Index of the justifying entry.
    pub justifier: Option<usize>,
}

/// Every symbol pushed along one run of the machine of `g`, with
/// justification pointers recovered from node labels. At an output step the
/// run follows `path[k]` for the `k`-th output (child 0 once `path` is
/// exhausted) and stops at a leaf.
pub fn traversal_log(m: &Machine, g: &CompGraph, steps: usize, path: &[usize]) -> Vec<LogEntry> {
    let mut stack = m.initial.stack.clone();
    // Same shape as `stack`, holding log indices instead of nodes.
    let mut shadow = HoStack::empty(m.order);
    let mut log = Vec::new();
    for (i, s) in stack.top_symbols().iter().enumerate() {
        log.push(LogEntry {
            node: s.sym,
            justifier: None,
        });
        shadow = shadow.push1(StackSymbol { sym: Sym(i as u32), link: s.link });
    }
    let mut state = m.initial.state;
    let mut outputs = 0;
    for _ in 0..steps {
        let Ok(top) = stack.top1() else { break };
        let Some(t) = m.transition(state, Some(top.sym)) else { break };
        let (ops, next) = match t {
            Transition::Ops(ops, next) => (ops, *next),
            Transition::Output { succs, .. } => {
                let dir = path.get(outputs).copied().unwrap_or(0);
                outputs += 1;
                match succs.get(dir) {
                    Some((ops, next)) => (ops, *next),
                    None => break,
                }
            }
        };
        for &op in ops {
            let Ok(next_stack) = m.apply(op, &stack) else { return log };
            let pushed = matches!(op, Op::Push1(_) | Op::PushChild { .. });
            if pushed {
                let sym = next_stack.top1().expect("just pushed");
                let idx = log.len();
                log.push(LogEntry {
                    node: sym.sym,
                    justifier: justify(g, &log, &stack, &shadow, sym.sym, idx),
                });
                shadow = shadow.push1(StackSymbol {
                    sym: Sym(idx as u32),
                    link: sym.link,
                });
            } else {
                shadow = m.apply(op, &shadow).expect("shadow mirrors the stack");
            }
            stack = next_stack;
        }
        state = next;
    }
    log
}

fn justify(g: &CompGraph, log: &[LogEntry], stack: &HoStack, shadow: &HoStack, sym: Sym, idx: usize) -> Option<usize> {
    let node = g.node(sym.into());
    match node.kind {
        NodeKind::Lambda if node.prime => idx.checked_sub(1),
        NodeKind::Lambda => {
            let prev = log.get(idx.checked_sub(1)?)?;
            match g.node(prev.node.into()).kind {
                NodeKind::Var => prev.justifier?.checked_sub(1),
                _ => Some(idx - 1),
            }
        }
        NodeKind::Var => {
            let binder = Sym::from(node.var?.binder);
            let pv = stack.top_symbols();
            let pos = pv.iter().rposition(|s| s.sym == binder)?;
            Some(shadow.top_symbols()[pos].sym.0 as usize)
        }
        NodeKind::App | NodeKind::Terminal => None,
    }
}
