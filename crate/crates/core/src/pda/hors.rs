use std::collections::BTreeSet;

use crate::comptree::build_comp_graph;
use crate::cpda::{build_cpda, Op, State, Transition};
use crate::error::Result;
use crate::hostack::Sym;
use crate::scheme::{NonTerminal, RawRule, RecursionScheme};
use crate::types::{AppTerm, SimpleType};

use super::{derive_pda, DeriveOptions, PdaMachine};

/// `κ_j` over `m` states: `κ_0 = o` and
/// `κ_j = κ_{j-1}^m -> ... -> κ_0^m -> o`.
pub fn kappa_type(j: u32, m: usize) -> SimpleType {
    let mut kappas: Vec<SimpleType> = vec![SimpleType::base()];
    for k in 1..=j as usize {
        let args: Vec<SimpleType> = (0..k)
            .rev()
            .flat_map(|i| std::iter::repeat_n(kappas[i].clone(), m))
            .collect();
        kappas.push(SimpleType::from_args(args));
    }
    kappas.swap_remove(j as usize)
}

struct Names {
    m: usize,
}

impl Names {
    fn f(&self, p: State, a: Option<Sym>) -> String {
        match a {
            Some(s) => format!("F{}_{}", p, s.0),
            None => format!("F{}_bot", p),
        }
    }

    fn psi(&self, j: u32, q: State) -> String {
        format!("x{}_{}", j, q)
    }

    fn omega(&self, j: u32) -> String {
        format!("Omega{}", j)
    }

    /// `Ψ̄_hi ... Ψ̄_lo`; empty when `hi < lo`.
    fn psis(&self, hi: i64, lo: i64) -> Vec<AppTerm> {
        let mut out = Vec::new();
        let mut j = hi;
        while j >= lo && j >= 0 {
            out.extend((0..self.m).map(|q| AppTerm::sym(self.psi(j as u32, q))));
            j -= 1;
        }
        out
    }

    fn omegas(&self, hi: i64, lo: i64) -> Vec<AppTerm> {
        let mut out = Vec::new();
        let mut j = hi;
        while j >= lo && j >= 0 {
            out.extend((0..self.m).map(|_| AppTerm::sym(self.omega(j as u32))));
            j -= 1;
        }
        out
    }
}

/// A safe, homogeneously typed scheme generating the tree of `pda`. The
/// machine is normalized first. Non-terminal `F{p}_{a}` stands for state
/// `p` with `a` on top; its arguments are, per order, one continuation per
/// state for the stack left after popping at that order.
pub fn pda_to_hors(pda: &PdaMachine) -> Result<RecursionScheme> {
    let pda = if pda.is_normalized() { pda.clone() } else { pda.normalize()? };
    let n = pda.order() as i64;
    let m = pda.states().len();
    let names = Names { m };
    let init = pda.initial_top()?;
    let q0 = pda.initial().state;

    let mut seen: BTreeSet<(State, Option<Sym>)> = BTreeSet::new();
    let mut work: Vec<(State, Option<Sym>)> = Vec::new();
    let visit = |seen: &mut BTreeSet<_>, work: &mut Vec<_>, key: (State, Option<Sym>)| {
        if seen.insert(key) {
            work.push(key);
        }
    };
    visit(&mut seen, &mut work, (q0, init));
    if init.is_some() {
        for i in 0..m {
            visit(&mut seen, &mut work, (i, None));
        }
    }
    while let Some((p, a)) = work.pop() {
        match pda.transition(p, a) {
            Some(Transition::Ops(ops, q)) => match ops[0] {
                Op::Push1(b) => {
                    visit(&mut seen, &mut work, (*q, Some(b.sym)));
                    for i in 0..m {
                        visit(&mut seen, &mut work, (i, a));
                    }
                }
                Op::Push(_) => {
                    for i in 0..m {
                        visit(&mut seen, &mut work, (i, a));
                    }
                    visit(&mut seen, &mut work, (*q, a));
                }
                _ => {}
            },
            Some(Transition::Output { succs, .. }) => {
                for (_, q) in succs {
                    visit(&mut seen, &mut work, (*q, a));
                }
            }
            None => {}
        }
    }

    let call = |p: State, a: Option<Sym>, args: Vec<AppTerm>| AppTerm::apply(AppTerm::sym(names.f(p, a)), args);
    let kappa_n = kappa_type(n as u32, m);
    let mut nonterminals = vec![NonTerminal {
        name: "S".into(),
        ty: SimpleType::base(),
    }];
    let start_body = match init {
        None => call(q0, None, names.omegas(n - 1, 0)),
        Some(b) => {
            let mut args: Vec<AppTerm> = (0..m).map(|i| call(i, None, names.omegas(n - 1, n - 1))).collect();
            args.extend(names.omegas(n - 2, 0));
            call(q0, Some(b), args)
        }
    };
    let mut rules = vec![RawRule {
        head: "S".into(),
        params: Vec::new(),
        body: start_body,
        line: 0,
    }];
    for j in 0..n as u32 {
        nonterminals.push(NonTerminal {
            name: names.omega(j),
            ty: kappa_type(j, m),
        });
        rules.push(RawRule {
            head: names.omega(j),
            params: (0..j as usize * m).map(|k| format!("y{}", k)).collect(),
            body: AppTerm::sym(names.omega(0)),
            line: 0,
        });
    }
    let params: Vec<String> = (0..n)
        .rev()
        .flat_map(|j| (0..m).map(move |q| (j, q)))
        .map(|(j, q)| names.psi(j as u32, q))
        .collect();
    for &(p, a) in &seen {
        let body = match pda.transition(p, a) {
            None => AppTerm::sym(names.omega(0)),
            Some(Transition::Ops(ops, q)) => match ops[0] {
                Op::Push1(b) => {
                    let mut args: Vec<AppTerm> = (0..m).map(|i| call(i, a, names.psis(n - 1, n - 1))).collect();
                    args.extend(names.psis(n - 2, 0));
                    call(*q, Some(b.sym), args)
                }
                Op::Push(j) => {
                    let j = j as i64;
                    let mut args = names.psis(n - 1, n - j + 1);
                    args.extend((0..m).map(|i| call(i, a, names.psis(n - 1, n - j))));
                    args.extend(names.psis(n - j - 1, 0));
                    call(*q, a, args)
                }
                Op::Pop(k) => {
                    let k = k as i64;
                    AppTerm::apply(AppTerm::sym(names.psi((n - k) as u32, *q)), names.psis(n - k - 1, 0))
                }
                _ => unreachable!("normalized machines use static operations"),
            },
            Some(Transition::Output { terminal, succs }) => AppTerm::apply(
                AppTerm::sym(pda.terminals()[*terminal].name.clone()),
                succs.iter().map(|(_, q)| call(*q, a, names.psis(n - 1, 0))),
            ),
        };
        nonterminals.push(NonTerminal {
            name: names.f(p, a),
            ty: kappa_n.clone(),
        });
        rules.push(RawRule {
            head: names.f(p, a),
            params: params.clone(),
            body,
            line: 0,
        });
    }
    RecursionScheme::new(pda.terminals().to_vec(), nonterminals, rules, "S")
}

/// An equivalent safe scheme for an incrementally-bound one, by way of its
/// pushdown automaton.
pub fn roundtrip_safe_scheme(g: &RecursionScheme) -> Result<RecursionScheme> {
    roundtrip_safe_scheme_with(g, DeriveOptions::default())
}

pub fn roundtrip_safe_scheme_with(g: &RecursionScheme, opts: DeriveOptions) -> Result<RecursionScheme> {
    let cg = build_comp_graph(g);
    let cpda = build_cpda(&cg)?;
    pda_to_hors(&derive_pda(&cpda, &cg, opts)?)
}
