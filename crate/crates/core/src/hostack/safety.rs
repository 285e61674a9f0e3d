use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{HoStack, StackError, StackSymbol, SymbolInfo};

/// One entry of an order-decomposition: a lambda symbol of the top 1-stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecEntry {
    /// Position in the top 1-stack, from the bottom.
    pub position: usize,
    pub symbol: StackSymbol,
    pub order: u32,
}

/// `orddec_l(s)`, outermost entry first: scanning the top 1-stack downwards,
/// each entry is the next lambda whose order exceeds the previous one.
pub fn order_decomposition(s: &HoStack, l: u32, info: &dyn SymbolInfo) -> Vec<DecEntry> {
    let list = s.top_list();
    let len = list.len();
    let cap = info.max_lambda_order();
    let mut threshold = l;
    let mut out = Vec::new();
    for (i, sym) in list.iter().enumerate() {
        if threshold >= cap {
            break;
        }
        if info.is_lambda(sym.sym) {
            let o = info.order(sym.sym);
            if o > threshold {
                out.push(DecEntry {
                    position: len - 1 - i,
                    symbol: *sym,
                    order: o,
                });
                threshold = o;
            }
        }
    }
    out.reverse();
    out
}

/// A collapse taken while checking safety, and the threshold required of
/// its result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    pub position: usize,
    pub symbol: StackSymbol,
    pub threshold: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SafetyFailure {
    LinkHeight {
        position: usize,
        symbol: StackSymbol,
        height: u32,
    },
    Collapse {
        position: usize,
        symbol: StackSymbol,
        error: StackError,
    },
}

/// Why a stack is not `l`-safe: the collapses leading to the offending
/// sub-stack, then the failure found there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SafetyWitness {
    pub path: Vec<WitnessStep>,
    pub failure: SafetyFailure,
}

impl SafetyWitness {
    pub fn describe(&self, info: &dyn SymbolInfo) -> String {
        let mut parts: Vec<String> = self
            .path
            .iter()
            .map(|s| {
                format!(
                    "collapse at #{} {} must be {}-safe",
                    s.position,
                    info.name(s.symbol.sym),
                    s.threshold
                )
            })
            .collect();
        parts.push(match &self.failure {
            SafetyFailure::LinkHeight {
                position,
                symbol,
                height,
            } => format!(
                "decomposition entry #{} {} has link height {}",
                position,
                info.name(symbol.sym),
                height
            ),
            SafetyFailure::Collapse {
                position,
                symbol,
                error,
            } => format!("collapse at #{} {} fails: {}", position, info.name(symbol.sym), error),
        });
        parts.join("; ")
    }
}

impl fmt::Display for SafetyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        struct Raw;
        impl SymbolInfo for Raw {
            fn is_lambda(&self, _: super::Sym) -> bool {
                false
            }
            fn order(&self, _: super::Sym) -> u32 {
                0
            }
            fn is_prime(&self, _: super::Sym) -> bool {
                false
            }
            fn name(&self, s: super::Sym) -> String {
                format!("s{}", s.0)
            }
        }
        f.write_str(&self.describe(&Raw))
    }
}

type Key = (Vec<usize>, u32);

struct Frame {
    stack: HoStack,
    key: Key,
    children: Vec<(WitnessStep, HoStack, Key)>,
    next: usize,
}

/// Memoizing `l`-safety checker. Results are keyed by the identity of the
/// shared stack cells, so one checker can serve every configuration of a
/// run; checked stacks are kept alive for as long as the checker.
pub struct SafetyChecker<'a> {
    info: &'a dyn SymbolInfo,
    memo: HashMap<Key, Option<SafetyWitness>>,
    pins: Vec<HoStack>,
}

impl<'a> SafetyChecker<'a> {
    pub fn new(info: &'a dyn SymbolInfo) -> Self {
        SafetyChecker {
            info,
            memo: HashMap::new(),
            pins: Vec::new(),
        }
    }

    pub fn check(&mut self, s: &HoStack, l: u32) -> Result<(), SafetyWitness> {
        let root: Key = (s.identity(), l);
        if let Some(r) = self.memo.get(&root) {
            return r.clone().map_or(Ok(()), Err);
        }
        let mut frames = match self.open(s, l) {
            Ok(f) => vec![f],
            Err(w) => {
                self.finish(s.clone(), root, Some(w.clone()));
                return Err(w);
            }
        };
        while let Some(frame) = frames.last_mut() {
            if frame.next == frame.children.len() {
                let f = frames.pop().expect("non-empty");
                self.finish(f.stack, f.key, None);
                continue;
            }
            let (step, child, ckey) = &frame.children[frame.next];
            match self.memo.get(ckey) {
                Some(None) => frame.next += 1,
                Some(Some(w)) => {
                    let mut w = w.clone();
                    w.path.insert(0, step.clone());
                    let f = frames.pop().expect("non-empty");
                    self.finish(f.stack, f.key, Some(w));
                }
                None => {
                    let (child, ckey, thr) = (child.clone(), ckey.clone(), step.threshold);
                    match self.open(&child, thr) {
                        Ok(f) => frames.push(f),
                        Err(w) => self.finish(child, ckey, Some(w)),
                    }
                }
            }
        }
        self.memo[&root].clone().map_or(Ok(()), Err)
    }

    fn finish(&mut self, s: HoStack, key: Key, result: Option<SafetyWitness>) {
        self.memo.insert(key, result);
        self.pins.push(s);
    }

    /// Clause 1 and the collapsed sub-stacks that clause 2 must check.
    fn open(&self, s: &HoStack, l: u32) -> Result<Frame, SafetyWitness> {
        let dec = order_decomposition(s, l, self.info);
        for e in &dec {
            if let Some(link) = e.symbol.link {
                if link.height != 1 {
                    return Err(SafetyWitness {
                        path: Vec::new(),
                        failure: SafetyFailure::LinkHeight {
                            position: e.position,
                            symbol: e.symbol,
                            height: link.height,
                        },
                    });
                }
            }
        }
        let mut children = Vec::new();
        // dec[r - q] is the q-th entry counted from the innermost one.
        for idx in (0..dec.len()).rev() {
            let e = dec[idx];
            let Some(link) = e.symbol.link else { continue };
            if link.order > s.order() {
                continue;
            }
            let threshold = if idx + 1 == dec.len() {
                l
            } else {
                dec[idx + 1].order
            };
            let collapsed = s.prefix_top(e.position).and_then(|p| p.collapse());
            match collapsed {
                Ok(t) => {
                    let key = (t.identity(), threshold);
                    children.push((
                        WitnessStep {
                            position: e.position,
                            symbol: e.symbol,
                            threshold,
                        },
                        t,
                        key,
                    ));
                }
                Err(error) => {
                    return Err(SafetyWitness {
                        path: Vec::new(),
                        failure: SafetyFailure::Collapse {
                            position: e.position,
                            symbol: e.symbol,
                            error,
                        },
                    })
                }
            }
        }
        Ok(Frame {
            stack: s.clone(),
            key: (s.identity(), l),
            children,
            next: 0,
        })
    }
}

/// Is `s` `l`-safe? On failure the witness names the collapses leading to
/// the offending sub-stack.
pub fn is_l_safe(s: &HoStack, l: u32, info: &dyn SymbolInfo) -> Result<(), SafetyWitness> {
    SafetyChecker::new(info).check(s, l)
}

pub fn is_safe(s: &HoStack, info: &dyn SymbolInfo) -> Result<(), SafetyWitness> {
    is_l_safe(s, 0, info)
}
