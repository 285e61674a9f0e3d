//! Collapsible pushdown automata. [`build_cpda`] turns a computation graph
//! into the order-`n` machine whose stack alphabet is the graph's nodes;
//! the same [`Machine`] type also runs link-free machines.

mod monitor;
mod trace;
mod views;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::comptree::{CompGraph, NodeKind};
use crate::error::{Error, Result};
use crate::hostack::{HoStack, Link, OrderTable, StackError, StackSymbol, Sym, SymbolClass, SymbolInfo};
use crate::par::Exec;
use crate::tree::ValueTree;
use crate::types::RankedSymbol;

pub use monitor::{safety_monitor, MonitorReport, MonitorViolation, ViolationKind};
pub use trace::{trace_run, TraceOptions};
pub use views::{long_oview, oview, pview, traversal_log, LogEntry};

pub type State = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Op {
    Push1(StackSymbol),
    /// `push_1` of `E_index(top_1)`.
    PushChild { index: usize, link: Option<Link> },
    Push(u32),
    Pop(u32),
    Collapse,
    /// Link-free replacement for `collapse`: `pop_1` at a prime lambda and
    /// `pop_{n-ord+1}` at any other lambda. With `uniform` set the prime
    /// case also uses `pop_{n-ord+1}`.
    PopForCollapse { uniform: bool },
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let link = |l: &Option<Link>| l.map(|l| format!("^({},{})", l.order, l.height)).unwrap_or_default();
        match self {
            Op::Push1(s) => write!(f, "push1 s{}{}", s.sym.0, link(&s.link)),
            Op::PushChild { index, link: l } => write!(f, "push1 E{}{}", index, link(l)),
            Op::Push(j) => write!(f, "push{}", j),
            Op::Pop(j) => write!(f, "pop{}", j),
            Op::Collapse => write!(f, "collapse"),
            Op::PopForCollapse { uniform: false } => write!(f, "pop-collapse"),
            Op::PopForCollapse { uniform: true } => write!(f, "pop-collapse-uniform"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Transition {
    Ops(Vec<Op>, State),
    /// Emit a terminal; child `i` continues from `succs[i]`.
    Output {
        terminal: usize,
        succs: Vec<(Vec<Op>, State)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub state: State,
    pub stack: HoStack,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StuckReason {
    NoTransition { state: State, top: Option<Sym> },
    Stack { op: Op, error: StackError },
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::NoTransition { state, top: Some(s) } => {
                write!(f, "no transition for state {} at s{}", state, s.0)
            }
            StuckReason::NoTransition { state, top: None } => {
                write!(f, "no transition for state {} at bottom", state)
            }
            StuckReason::Stack { op, error } => write!(f, "{} failed: {}", op, error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Internal(Configuration),
    Output { terminal: String, succs: Vec<Configuration> },
    Stuck(StuckReason),
}

/// One `→` step broken into its instructions.
#[derive(Debug, Clone)]
pub struct MicroStep {
    /// The stack after each instruction of the main sequence.
    pub trace: Vec<(Op, HoStack)>,
    pub outcome: StepOutcome,
}

/// A higher-order pushdown automaton with optional links. Transitions are
/// keyed by state and top symbol, `None` standing for the bottom of an
/// empty 1-stack.
#[derive(Debug, Clone)]
pub struct Machine {
    pub(crate) order: u32,
    pub(crate) states: Vec<String>,
    pub(crate) table: OrderTable,
    pub(crate) labels: Vec<String>,
    /// `children[s][i]` is `E_i(s)`.
    pub(crate) children: Vec<Vec<Option<Sym>>>,
    pub(crate) terminals: Vec<RankedSymbol>,
    pub(crate) delta: BTreeMap<(State, Option<Sym>), Transition>,
    pub(crate) initial: Configuration,
}

impl Machine {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn table(&self) -> &OrderTable {
        &self.table
    }

    pub fn terminals(&self) -> &[RankedSymbol] {
        &self.terminals
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&(State, Option<Sym>), &Transition)> {
        self.delta.iter()
    }

    pub fn transition(&self, state: State, top: Option<Sym>) -> Option<&Transition> {
        self.delta.get(&(state, top))
    }

    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    /// Human-readable name of a stack symbol.
    pub fn label(&self, s: Sym) -> &str {
        &self.labels[s.0 as usize]
    }

    pub fn render_stack(&self, s: &HoStack) -> String {
        crate::hostack::render_stack(s, &|x| self.table.name_of(x).to_string())
    }

    /// `E_i(s)`.
    pub fn child(&self, s: Sym, i: usize) -> Option<Sym> {
        self.children.get(s.0 as usize).and_then(|c| c.get(i).copied().flatten())
    }

    fn top_of(stack: &HoStack) -> Option<Sym> {
        stack.top1().ok().map(|s| s.sym)
    }

    pub fn apply(&self, op: Op, s: &HoStack) -> std::result::Result<HoStack, StackError> {
        match op {
            Op::Push1(x) => Ok(s.push1(x)),
            Op::PushChild { index, link } => {
                let top = s.top1()?.sym;
                let c = self.child(top, index).ok_or(StackError::EmptyTop)?;
                Ok(s.push1(StackSymbol { sym: c, link }))
            }
            Op::Push(j) => s.push(j),
            Op::Pop(j) => s.pop(j),
            Op::Collapse => s.collapse(),
            Op::PopForCollapse { uniform } => {
                let top = s.top1()?.sym;
                if self.table.is_prime(top) && !uniform {
                    s.pop(1)
                } else {
                    let o = self.table.order(top);
                    let j = (self.order + 1).checked_sub(o).ok_or(StackError::OrderOutOfRange {
                        op: 0,
                        stack: self.order,
                    })?;
                    s.pop(j)
                }
            }
        }
    }

    fn run_ops(
        &self,
        ops: &[Op],
        s: &HoStack,
        mut record: Option<&mut Vec<(Op, HoStack)>>,
    ) -> std::result::Result<HoStack, StuckReason> {
        let mut cur = s.clone();
        for &op in ops {
            cur = self
                .apply(op, &cur)
                .map_err(|error| StuckReason::Stack { op, error })?;
            if let Some(r) = record.as_deref_mut() {
                r.push((op, cur.clone()));
            }
        }
        Ok(cur)
    }

    fn step_impl(&self, c: &Configuration, record: Option<&mut Vec<(Op, HoStack)>>) -> StepOutcome {
        let top = Self::top_of(&c.stack);
        let Some(t) = self.delta.get(&(c.state, top)) else {
            return StepOutcome::Stuck(StuckReason::NoTransition { state: c.state, top });
        };
        match t {
            Transition::Ops(ops, next) => match self.run_ops(ops, &c.stack, record) {
                Ok(stack) => StepOutcome::Internal(Configuration { state: *next, stack }),
                Err(r) => StepOutcome::Stuck(r),
            },
            Transition::Output { terminal, succs } => {
                let mut out = Vec::with_capacity(succs.len());
                for (ops, q) in succs {
                    match self.run_ops(ops, &c.stack, None) {
                        Ok(stack) => out.push(Configuration { state: *q, stack }),
                        Err(r) => return StepOutcome::Stuck(r),
                    }
                }
                StepOutcome::Output {
                    terminal: self.terminals[*terminal].name.clone(),
                    succs: out,
                }
            }
        }
    }

    /// One `→` step.
    pub fn step(&self, c: &Configuration) -> StepOutcome {
        self.step_impl(c, None)
    }

    /// One `→` step together with the intermediate stacks.
    pub fn micro_step(&self, c: &Configuration) -> MicroStep {
        let mut trace = Vec::new();
        let outcome = self.step_impl(c, Some(&mut trace));
        MicroStep { trace, outcome }
    }

    /// Depth-truncated tree accepted by the machine. Each branch may spend
    /// `budget` steps reaching its next output; a branch that runs out, or
    /// gets stuck, becomes `DIVERGENT`.
    pub fn generate_tree(&self, depth: usize, budget: u64) -> ValueTree {
        self.generate_tree_with(depth, budget, Exec::default())
    }

    pub fn generate_tree_with(&self, depth: usize, budget: u64, exec: Exec) -> ValueTree {
        self.generate_from(self.initial.clone(), depth, budget, exec)
    }

    pub fn generate_from(&self, c: Configuration, depth: usize, budget: u64, exec: Exec) -> ValueTree {
        if depth == 0 {
            return ValueTree::Cut;
        }
        let mut c = c;
        for _ in 0..budget {
            match self.step(&c) {
                StepOutcome::Internal(next) => c = next,
                StepOutcome::Output { terminal, succs } => {
                    let children = exec.map(&succs, |s| self.generate_from(s.clone(), depth - 1, budget, exec));
                    return ValueTree::node(terminal, children);
                }
                StepOutcome::Stuck(_) => return ValueTree::Divergent,
            }
        }
        ValueTree::Divergent
    }
}

/// The link a machine of order `n` gives `s` when pushing it: `(1,1)` for
/// prime lambdas, `(n-ord+1, 1)` for other lambdas of positive order and
/// none otherwise.
pub fn convention_link(info: &dyn SymbolInfo, s: Sym, n: u32) -> Option<Link> {
    if !info.is_lambda(s) {
        return None;
    }
    if info.is_prime(s) {
        return Some(Link::new(1, 1));
    }
    let o = info.order(s);
    (o >= 1 && o <= n).then(|| Link::new(n - o + 1, 1))
}

/// Stack order of the machine of a graph: the scheme order, at least 1.
pub fn machine_order(g: &CompGraph) -> u32 {
    g.scheme_order().max(1)
}

/// Symbol table of a graph; `Sym(i)` is node `i`.
pub fn graph_table(g: &CompGraph) -> OrderTable {
    let mut t = OrderTable::new();
    for n in g.nodes() {
        let class = match n.kind {
            NodeKind::Lambda => SymbolClass::Lambda {
                order: n.order,
                prime: n.prime,
            },
            NodeKind::Var => SymbolClass::Var { order: n.order },
            NodeKind::App => SymbolClass::App,
            NodeKind::Terminal => SymbolClass::Terminal,
        };
        t.add(&n.id.to_string(), class);
    }
    t
}

/// The collapsible pushdown automaton of a computation graph. It has a
/// single control state and its transitions depend on the top symbol only.
pub fn build_cpda(g: &CompGraph) -> Result<Machine> {
    let n = machine_order(g);
    let mut terminals: Vec<RankedSymbol> = Vec::new();
    let mut delta = BTreeMap::new();
    for node in g.nodes() {
        let u = Sym::from(node.id);
        let child = |i: usize| Sym::from(node.child(i).expect("graph nodes have their children"));
        let t = match node.kind {
            NodeKind::App => Transition::Ops(vec![Op::Push1(StackSymbol::linked(child(0), 1, 1))], 0),
            NodeKind::Lambda => Transition::Ops(vec![Op::Push1(StackSymbol::plain(child(1)))], 0),
            NodeKind::Terminal => {
                let idx = match terminals.iter().position(|t| t.name == node.label) {
                    Some(i) => i,
                    None => {
                        terminals.push(RankedSymbol::new(node.label.clone(), node.children.len()));
                        terminals.len() - 1
                    }
                };
                Transition::Output {
                    terminal: idx,
                    succs: (1..=node.children.len())
                        .map(|index| (vec![Op::PushChild { index, link: None }], 0))
                        .collect(),
                }
            }
            NodeKind::Var => {
                let v = node.var.expect("variables are bound");
                let l = node.order;
                if l >= n {
                    return Err(Error::OrderOverflow {
                        order: l,
                        scheme_order: n,
                    });
                }
                let mut ops = Vec::with_capacity(v.span + 3);
                if l >= 1 {
                    ops.push(Op::Push(n - l + 1));
                }
                ops.extend(std::iter::repeat_n(Op::Pop(1), v.span));
                ops.push(Op::Collapse);
                ops.push(Op::PushChild {
                    index: v.param_index,
                    link: (l >= 1).then(|| Link::new(n - l + 1, 1)),
                });
                Transition::Ops(ops, 0)
            }
        };
        delta.insert((0, Some(u)), t);
    }
    let table = graph_table(g);
    let children = g
        .nodes()
        .iter()
        .map(|node| (0..=node.children.len()).map(|i| node.child(i).map(Sym::from)).collect())
        .collect();
    let stack = HoStack::empty(n).push1(StackSymbol::plain(g.root().into()));
    Ok(Machine {
        order: n,
        states: vec!["q0".into()],
        table,
        labels: g.nodes().iter().map(|x| g.describe(x.id)).collect(),
        children,
        terminals,
        delta,
        initial: Configuration { state: 0, stack },
    })
}
