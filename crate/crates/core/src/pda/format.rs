//! PDA file format:
//!
//! ```text
//! %order 2
//! %states q0 q1
//! %stack a b
//! %alphabet f:1 e:0
//! %init a
//! q0 a -> push1 b q1
//! q1 b -> pushj 2 q0
//! q0 b -> popj 1 q1
//! q1 a -> output f q0
//! ```
//!
//! The first listed state is initial. `bot` names the bottom of an empty
//! 1-stack; `%init` pushes one symbol on the initial stack.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::cpda::{Configuration, Machine, Op, State, Transition};
use crate::error::{Error, Result};
use crate::hostack::{HoStack, OrderTable, StackSymbol, Sym, SymbolClass};
use crate::types::RankedSymbol;

use super::PdaMachine;

const BOTTOM: &str = "bot";

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column: 1,
        message: message.into(),
    }
}

/// Parses a PDA file.
pub fn parse_pda(text: &str) -> Result<PdaMachine> {
    let mut order = None;
    let mut states: Vec<String> = Vec::new();
    let mut table = OrderTable::new();
    let mut terminals: Vec<RankedSymbol> = Vec::new();
    let mut init: Option<(usize, String)> = None;
    let mut rules: Vec<(usize, Vec<&str>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some(&first) = words.first() else { continue };
        match first {
            "%order" => {
                let n: u32 = words
                    .get(1)
                    .and_then(|w| w.parse().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| syntax(line, "expected `%order N` with N >= 1"))?;
                order = Some(n);
            }
            "%states" => states.extend(words[1..].iter().map(|s| s.to_string())),
            "%stack" => {
                for w in &words[1..] {
                    if *w == BOTTOM || table.lookup(w).is_some() {
                        return Err(syntax(line, format!("stack symbol `{}` reserved or repeated", w)));
                    }
                    table.add(w, SymbolClass::App);
                }
            }
            "%alphabet" => {
                for w in &words[1..] {
                    let (name, rank) = w
                        .split_once(':')
                        .and_then(|(n, r)| Some((n, r.parse::<usize>().ok()?)))
                        .ok_or_else(|| syntax(line, format!("expected name:rank, found `{}`", w)))?;
                    terminals.push(RankedSymbol::new(name, rank));
                }
            }
            "%init" => {
                let w = words.get(1).ok_or_else(|| syntax(line, "expected `%init SYMBOL`"))?;
                init = Some((line, w.to_string()));
            }
            d if d.starts_with('%') => return Err(syntax(line, format!("unknown directive `{}`", d))),
            _ => rules.push((line, words)),
        }
    }

    let order = order.ok_or_else(|| syntax(1, "missing %order"))?;
    if states.is_empty() {
        return Err(syntax(1, "missing %states"));
    }
    let state_index: HashMap<&str, State> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let state = |line: usize, w: &str| {
        state_index
            .get(w)
            .copied()
            .ok_or_else(|| syntax(line, format!("unknown state `{}`", w)))
    };
    let symbol = |line: usize, w: &str| -> Result<Option<Sym>> {
        if w == BOTTOM {
            return Ok(None);
        }
        table
            .lookup(w)
            .map(Some)
            .ok_or_else(|| syntax(line, format!("unknown stack symbol `{}`", w)))
    };
    let level = |line: usize, w: Option<&&str>, min: u32| -> Result<u32> {
        w.and_then(|w| w.parse().ok())
            .filter(|j| (min..=order).contains(j))
            .ok_or_else(|| syntax(line, format!("expected an order between {} and {}", min, order)))
    };

    let mut delta = BTreeMap::new();
    for (line, words) in rules {
        if words.len() < 4 || words[2] != "->" {
            return Err(syntax(line, "expected `STATE SYMBOL -> OPERATION`"));
        }
        let p = state(line, words[0])?;
        let a = symbol(line, words[1])?;
        let args = &words[4..];
        let t = match words[3] {
            "push1" if args.len() == 2 => {
                let b = symbol(line, args[0])?.ok_or_else(|| syntax(line, "cannot push the bottom symbol"))?;
                Transition::Ops(vec![Op::Push1(StackSymbol::plain(b))], state(line, args[1])?)
            }
            "pushj" if args.len() == 2 => {
                Transition::Ops(vec![Op::Push(level(line, args.first(), 2)?)], state(line, args[1])?)
            }
            "popj" if args.len() == 2 => {
                Transition::Ops(vec![Op::Pop(level(line, args.first(), 1)?)], state(line, args[1])?)
            }
            "output" if !args.is_empty() => {
                let f = terminals
                    .iter()
                    .position(|t| t.name == args[0])
                    .ok_or_else(|| syntax(line, format!("unknown terminal `{}`", args[0])))?;
                let succs = args[1..]
                    .iter()
                    .map(|q| Ok((Vec::new(), state(line, q)?)))
                    .collect::<Result<Vec<_>>>()?;
                if succs.len() != terminals[f].rank {
                    return Err(syntax(
                        line,
                        format!("`{}` has rank {} but {} successor states", args[0], terminals[f].rank, succs.len()),
                    ));
                }
                Transition::Output { terminal: f, succs }
            }
            op => return Err(syntax(line, format!("malformed operation `{}`", op))),
        };
        if delta.insert((p, a), t).is_some() {
            return Err(Error::NonFunctionDelta(format!(
                "line {}: second transition for state {} at {}",
                line, words[0], words[1]
            )));
        }
    }

    let mut stack = HoStack::empty(order);
    if let Some((line, w)) = init {
        let s = symbol(line, &w)?.ok_or_else(|| syntax(line, "cannot push the bottom symbol"))?;
        stack = stack.push1(StackSymbol::plain(s));
    }
    let labels = table.symbols().map(|s| table.name_of(s).to_string()).collect();
    let children = vec![Vec::new(); table.len()];
    PdaMachine::new(Machine {
        order,
        states,
        table,
        labels,
        children,
        terminals,
        delta,
        initial: Configuration { state: 0, stack },
    })
}

impl PdaMachine {
    /// The symbol the initial stack holds above the bottom, if any. Errors
    /// when the initial stack has any other shape.
    pub fn initial_top(&self) -> Result<Option<Sym>> {
        let s = &self.initial.stack;
        let bottom = HoStack::empty(self.order);
        if *s == bottom {
            return Ok(None);
        }
        let top = s.top1()?;
        if *s != bottom.push1(top) {
            return Err(Error::Machine(
                "the initial stack must hold at most one symbol above the bottom".into(),
            ));
        }
        Ok(Some(top.sym))
    }

    /// Renders a normalized machine in the PDA file format.
    pub fn to_text(&self) -> Result<String> {
        if !self.is_normalized() {
            return Err(Error::Machine("only normalized machines can be written out".into()));
        }
        if self.initial.state != 0 {
            return Err(Error::Machine("the initial state must come first".into()));
        }
        let init = self.initial_top()?;
        let name = |s: Option<Sym>| s.map_or(BOTTOM.to_string(), |s| self.table.name_of(s).to_string());
        let mut out = String::new();
        writeln!(out, "%order {}", self.order).unwrap();
        writeln!(out, "%states {}", self.states.join(" ")).unwrap();
        let syms: Vec<String> = self.table.symbols().map(|s| name(Some(s))).collect();
        writeln!(out, "%stack {}", syms.join(" ")).unwrap();
        let alpha: Vec<String> = self.terminals.iter().map(|t| format!("{}:{}", t.name, t.rank)).collect();
        writeln!(out, "%alphabet {}", alpha.join(" ")).unwrap();
        if init.is_some() {
            writeln!(out, "%init {}", name(init)).unwrap();
        }
        for (&(p, a), t) in self.transitions() {
            write!(out, "{} {} -> ", self.states[p], name(a)).unwrap();
            match t {
                Transition::Ops(ops, q) => {
                    let op = match ops[0] {
                        Op::Push1(s) => format!("push1 {}", name(Some(s.sym))),
                        Op::Push(j) => format!("pushj {}", j),
                        Op::Pop(j) => format!("popj {}", j),
                        _ => unreachable!("normalized"),
                    };
                    writeln!(out, "{} {}", op, self.states[*q]).unwrap();
                }
                Transition::Output { terminal, succs } => {
                    write!(out, "output {}", self.terminals[*terminal].name).unwrap();
                    for (_, q) in succs {
                        write!(out, " {}", self.states[*q]).unwrap();
                    }
                    writeln!(out).unwrap();
                }
            }
        }
        Ok(out)
    }
}
