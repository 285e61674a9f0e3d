//! Higher-order stacks whose order-1 symbols carry optional `(order, height)`
//! links. Stacks are persistent: every operation returns a new value and
//! shares structure with its input.

mod plist;
mod safety;
mod text;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::comptree::{CompGraph, NodeId};

use plist::PList;

pub use safety::{
    is_l_safe, is_safe, order_decomposition, DecEntry, SafetyChecker, SafetyFailure,
    SafetyWitness, WitnessStep,
};
pub use text::{parse_stack, render_stack, OrderTable, SymbolClass};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
pub enum StackError {
    #[error("pop_{0} on a stack whose top {0}-stack is too small")]
    EmptyPop(u32),
    #[error("top of an empty 1-stack")]
    EmptyTop,
    #[error("collapse at a symbol without a link")]
    AbsentLink,
    #[error("operation of order {op} on a stack of order {stack}")]
    OrderOutOfRange { op: u32, stack: u32 },
    #[error("occurrence {0:?} not found")]
    OccurrenceNotFound(Vec<usize>),
}

type StackResult<T> = std::result::Result<T, StackError>;

/// Stack alphabet element. For machines built from a computation graph this
/// is the node id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sym(pub u32);

impl From<NodeId> for Sym {
    fn from(n: NodeId) -> Self {
        Sym(n.0)
    }
}

impl From<Sym> for NodeId {
    fn from(s: Sym) -> Self {
        NodeId(s.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Link {
    pub order: u32,
    pub height: u32,
}

impl Link {
    pub fn new(order: u32, height: u32) -> Self {
        Link { order, height }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StackSymbol {
    pub sym: Sym,
    pub link: Option<Link>,
}

impl StackSymbol {
    pub fn plain(sym: Sym) -> Self {
        StackSymbol { sym, link: None }
    }

    pub fn linked(sym: Sym, order: u32, height: u32) -> Self {
        StackSymbol {
            sym,
            link: Some(Link::new(order, height)),
        }
    }
}

/// Kind and order queries needed by the order-decomposition.
pub trait SymbolInfo {
    fn is_lambda(&self, s: Sym) -> bool;
    fn order(&self, s: Sym) -> u32;
    fn is_prime(&self, s: Sym) -> bool;
    fn name(&self, s: Sym) -> String;

    /// Upper bound on lambda orders; lets scans stop early.
    fn max_lambda_order(&self) -> u32 {
        u32::MAX
    }
}

impl SymbolInfo for CompGraph {
    fn is_lambda(&self, s: Sym) -> bool {
        self.node(s.into()).is_lambda()
    }

    fn order(&self, s: Sym) -> u32 {
        self.node(s.into()).order
    }

    fn is_prime(&self, s: Sym) -> bool {
        self.node(s.into()).prime
    }

    fn name(&self, s: Sym) -> String {
        self.describe(s.into())
    }

    fn max_lambda_order(&self) -> u32 {
        self.scheme_order()
    }
}

#[derive(Clone)]
enum Repr {
    One(PList<StackSymbol>),
    /// Order >= 2; never empty.
    Many(u32, PList<HoStack>),
}

#[derive(Clone)]
pub struct HoStack(Repr);

/// Result of `top_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum Top {
    Symbol(StackSymbol),
    Stack(HoStack),
}

/// Path to a symbol or sub-stack: one index per level, outermost first,
/// counted from the bottom.
pub type Occurrence = Vec<usize>;

impl HoStack {
    /// `⊥_order`.
    pub fn empty(order: u32) -> Self {
        assert!(order >= 1, "stack order starts at 1");
        if order == 1 {
            HoStack(Repr::One(PList::new()))
        } else {
            HoStack(Repr::Many(order, PList::new().push(HoStack::empty(order - 1))))
        }
    }

    pub fn from_symbols(symbols: impl IntoIterator<Item = StackSymbol>) -> Self {
        HoStack(Repr::One(PList::from_bottom_up(symbols)))
    }

    /// Builds an order-`k+1` stack from order-`k` elements, bottom first.
    pub fn from_stacks(elems: Vec<HoStack>) -> StackResult<Self> {
        let Some(first) = elems.first() else {
            return Err(StackError::EmptyPop(0));
        };
        let k = first.order();
        if elems.iter().any(|e| e.order() != k) {
            return Err(StackError::OrderOutOfRange {
                op: k + 1,
                stack: k,
            });
        }
        Ok(HoStack(Repr::Many(k + 1, PList::from_bottom_up(elems))))
    }

    pub fn order(&self) -> u32 {
        match &self.0 {
            Repr::One(_) => 1,
            Repr::Many(o, _) => *o,
        }
    }

    /// Number of top-level elements.
    pub fn len(&self) -> usize {
        match &self.0 {
            Repr::One(l) => l.len(),
            Repr::Many(_, l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total number of order-1 symbols.
    pub fn size(&self) -> usize {
        match &self.0 {
            Repr::One(l) => l.len(),
            Repr::Many(_, l) => l.iter().map(HoStack::size).sum(),
        }
    }

    /// Top-level elements of an order >= 2 stack, bottom first.
    pub fn elements(&self) -> Vec<HoStack> {
        match &self.0 {
            Repr::One(_) => Vec::new(),
            Repr::Many(_, l) => l.to_vec(),
        }
    }

    /// Symbols of an order-1 stack, bottom first.
    pub fn symbols(&self) -> Vec<StackSymbol> {
        match &self.0 {
            Repr::One(l) => l.to_vec(),
            Repr::Many(..) => Vec::new(),
        }
    }

    fn check_order(&self, i: u32) -> StackResult<()> {
        if i == 0 || i > self.order() {
            return Err(StackError::OrderOutOfRange {
                op: i,
                stack: self.order(),
            });
        }
        Ok(())
    }

    /// Replaces the top element of an order >= 2 stack.
    fn map_top(&self, f: impl FnOnce(&HoStack) -> StackResult<HoStack>) -> StackResult<HoStack> {
        match &self.0 {
            Repr::One(_) => unreachable!("map_top on an order-1 stack"),
            Repr::Many(o, l) => {
                let top = l.top().expect("order >= 2 stacks are non-empty");
                let new_top = f(top)?;
                let rest = l.pop().expect("non-empty");
                Ok(HoStack(Repr::Many(*o, rest.push(new_top))))
            }
        }
    }

    pub fn push1(&self, s: StackSymbol) -> HoStack {
        match &self.0 {
            Repr::One(l) => HoStack(Repr::One(l.push(s))),
            Repr::Many(..) => self.map_top(|t| Ok(t.push1(s))).expect("push1 is total"),
        }
    }

    /// `pop_i`.
    pub fn pop(&self, i: u32) -> StackResult<HoStack> {
        self.check_order(i)?;
        match &self.0 {
            Repr::One(l) => l.pop().map(|l| HoStack(Repr::One(l))).ok_or(StackError::EmptyPop(1)),
            Repr::Many(o, l) if *o == i => {
                if l.len() < 2 {
                    return Err(StackError::EmptyPop(i));
                }
                Ok(HoStack(Repr::Many(*o, l.pop().expect("len >= 2"))))
            }
            Repr::Many(..) => self.map_top(|t| t.pop(i)),
        }
    }

    pub fn top1(&self) -> StackResult<StackSymbol> {
        match &self.0 {
            Repr::One(l) => l.top().copied().ok_or(StackError::EmptyTop),
            Repr::Many(_, l) => l.top().expect("non-empty").top1(),
        }
    }

    /// `top_i`; links are returned verbatim, even dangling ones.
    pub fn top(&self, i: u32) -> StackResult<Top> {
        self.check_order(i)?;
        if i == 1 {
            return self.top1().map(Top::Symbol);
        }
        match &self.0 {
            Repr::One(_) => unreachable!("checked order"),
            Repr::Many(o, l) => {
                let t = l.top().expect("non-empty");
                if *o == i {
                    Ok(Top::Stack(t.clone()))
                } else {
                    t.top(i)
                }
            }
        }
    }

    /// `top_i` for `i >= 2`, as a stack of order `i - 1`.
    pub fn top_stack(&self, i: u32) -> StackResult<HoStack> {
        match self.top(i)? {
            Top::Stack(s) => Ok(s),
            Top::Symbol(_) => Err(StackError::OrderOutOfRange {
                op: i,
                stack: self.order(),
            }),
        }
    }

    /// The top 1-stack.
    pub fn top_one(&self) -> HoStack {
        match &self.0 {
            Repr::One(_) => self.clone(),
            Repr::Many(_, l) => l.top().expect("non-empty").top_one(),
        }
    }

    /// Symbols of the top 1-stack, bottom first.
    pub fn top_symbols(&self) -> Vec<StackSymbol> {
        self.top_one().symbols()
    }

    pub(crate) fn top_list(&self) -> &PList<StackSymbol> {
        match &self.0 {
            Repr::One(l) => l,
            Repr::Many(_, l) => l.top().expect("non-empty").top_list(),
        }
    }

    /// `push_j` for `2 <= j <= order`: copies the top `(j-1)`-stack and
    /// renumbers order-`j` links in the copy.
    pub fn push(&self, j: u32) -> StackResult<HoStack> {
        self.check_order(j)?;
        if j < 2 {
            return Err(StackError::OrderOutOfRange {
                op: j,
                stack: self.order(),
            });
        }
        match &self.0 {
            Repr::One(_) => unreachable!("checked order"),
            Repr::Many(o, l) if *o == j => {
                let t = l.top().expect("non-empty");
                Ok(HoStack(Repr::Many(*o, l.push(t.renumber(j)))))
            }
            Repr::Many(..) => self.map_top(|t| t.push(j)),
        }
    }

    /// `s^<j>`: every link `(j, k)` becomes `(j, k+1)`.
    pub fn renumber(&self, j: u32) -> HoStack {
        match &self.0 {
            Repr::One(l) => {
                if !l.iter().any(|s| s.link.is_some_and(|k| k.order == j)) {
                    return self.clone();
                }
                HoStack(Repr::One(PList::from_bottom_up(l.to_vec().into_iter().map(|mut s| {
                    if let Some(k) = s.link.as_mut() {
                        if k.order == j {
                            k.height += 1;
                        }
                    }
                    s
                }))))
            }
            Repr::Many(o, l) => HoStack(Repr::Many(
                *o,
                PList::from_bottom_up(l.to_vec().iter().map(|e| e.renumber(j))),
            )),
        }
    }

    /// `pop_o^h` where `(o, h)` is the link of the top symbol.
    pub fn collapse(&self) -> StackResult<HoStack> {
        let link = self.top1()?.link.ok_or(StackError::AbsentLink)?;
        let mut s = self.clone();
        for _ in 0..link.height {
            s = s.pop(link.order)?;
        }
        Ok(s)
    }

    /// Occurrence of position `pos` (from the bottom) in the top 1-stack.
    pub fn top_occurrence(&self, pos: usize) -> Occurrence {
        let mut occ = Vec::with_capacity(self.order() as usize);
        let mut cur = self;
        while let Repr::Many(_, l) = &cur.0 {
            occ.push(l.len() - 1);
            cur = l.top().expect("non-empty");
        }
        occ.push(pos);
        occ
    }

    /// `s_{⊑m}`: truncates at the occurrence, keeping it.
    pub fn prefix_at(&self, occ: &[usize]) -> StackResult<HoStack> {
        self.prefix_impl(occ, true, occ)
    }

    /// `s_{<m}`: truncates strictly below the occurrence.
    pub fn strict_prefix_at(&self, occ: &[usize]) -> StackResult<HoStack> {
        self.prefix_impl(occ, false, occ)
    }

    fn prefix_impl(&self, occ: &[usize], inclusive: bool, full: &[usize]) -> StackResult<HoStack> {
        let not_found = || StackError::OccurrenceNotFound(full.to_vec());
        let (&i, rest) = occ.split_first().ok_or_else(not_found)?;
        let keep = if inclusive { i + 1 } else { i };
        match &self.0 {
            Repr::One(l) => {
                if i >= l.len() || !rest.is_empty() {
                    return Err(not_found());
                }
                Ok(HoStack(Repr::One(l.truncate(keep))))
            }
            Repr::Many(o, l) => {
                if i >= l.len() {
                    return Err(not_found());
                }
                if rest.is_empty() {
                    if keep == 0 {
                        return Ok(HoStack::empty(*o));
                    }
                    return Ok(HoStack(Repr::Many(*o, l.truncate(keep))));
                }
                let below = l.truncate(i);
                let elem = l.truncate(i + 1);
                let inner = elem.top().expect("index in range").prefix_impl(rest, inclusive, full)?;
                Ok(HoStack(Repr::Many(*o, below.push(inner))))
            }
        }
    }

    /// Keeps the top 1-stack up to and including position `pos`.
    pub fn prefix_top(&self, pos: usize) -> StackResult<HoStack> {
        self.prefix_at(&self.top_occurrence(pos))
    }

    /// Equality ignoring every link field.
    pub fn erased_eq(&self, other: &HoStack) -> bool {
        match (&self.0, &other.0) {
            (Repr::One(a), Repr::One(b)) => {
                a.ptr_eq(b) || (a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.sym == y.sym))
            }
            (Repr::Many(o1, a), Repr::Many(o2, b)) => {
                o1 == o2
                    && (a.ptr_eq(b)
                        || (a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.erased_eq(y))))
            }
            _ => false,
        }
    }

    /// A copy with every link removed.
    pub fn erase_links(&self) -> HoStack {
        match &self.0 {
            Repr::One(l) => HoStack(Repr::One(PList::from_bottom_up(
                l.to_vec().into_iter().map(|s| StackSymbol::plain(s.sym)),
            ))),
            Repr::Many(o, l) => HoStack(Repr::Many(
                *o,
                PList::from_bottom_up(l.to_vec().iter().map(HoStack::erase_links)),
            )),
        }
    }

    /// Identity of the shared cells along the top path. Equal keys imply
    /// equal stacks while both stacks are alive.
    pub(crate) fn identity(&self) -> Vec<usize> {
        let mut key = Vec::with_capacity(self.order() as usize + 1);
        let mut cur = self;
        loop {
            match &cur.0 {
                Repr::One(l) => {
                    key.push(l.addr());
                    return key;
                }
                Repr::Many(_, l) => {
                    key.push(l.pop().expect("non-empty").addr());
                    cur = l.top().expect("non-empty");
                }
            }
        }
    }

    pub fn render(&self, info: &dyn SymbolInfo) -> String {
        render_stack(self, &|s| info.name(s))
    }
}

impl PartialEq for HoStack {
    fn eq(&self, other: &HoStack) -> bool {
        match (&self.0, &other.0) {
            (Repr::One(a), Repr::One(b)) => {
                a.ptr_eq(b) || (a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x == y))
            }
            (Repr::Many(o1, a), Repr::Many(o2, b)) => {
                o1 == o2
                    && (a.ptr_eq(b)
                        || (a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x == y)))
            }
            _ => false,
        }
    }
}

impl Eq for HoStack {}

impl fmt::Debug for HoStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_stack(self, &|s| format!("s{}", s.0)))
    }
}
