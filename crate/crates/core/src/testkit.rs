//! Fixture schemes and seeded generators shared by tests, benches and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cpda::convention_link;
use crate::hostack::{HoStack, OrderTable, StackSymbol, Sym, SymbolClass};
use crate::scheme::{parse_scheme, RecursionScheme};
use crate::types::{parse_type, AppTerm, SimpleType, TypeEnv};

macro_rules! fixture {
    ($path:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/", $path))
    };
}

pub const PHI_TWICE: &str = fixture!("phi_twice.hors");
pub const NON_IB: &str = fixture!("non_ib.hors");
pub const NON_HOMOGENEOUS: &str = fixture!("non_homogeneous.hors");
pub const UNSAFE_M: &str = fixture!("unsafe_m.hors");

/// Incrementally-bound schemes of orders 1 to 3.
pub fn corpus_sources() -> Vec<(&'static str, &'static str)> {
    vec![
        ("pair", fixture!("corpus/pair.hors")),
        ("non_homogeneous", fixture!("corpus/non_homogeneous.hors")),
        ("list", fixture!("corpus/list.hors")),
        ("swap", fixture!("corpus/swap.hors")),
        ("twice", fixture!("corpus/twice.hors")),
        ("compose", fixture!("corpus/compose.hors")),
        ("divergent", fixture!("corpus/divergent.hors")),
        ("order3", fixture!("corpus/order3.hors")),
        ("church", fixture!("corpus/church.hors")),
        ("apply", fixture!("corpus/apply.hors")),
        ("mutual", fixture!("corpus/mutual.hors")),
        ("order3_apply", fixture!("corpus/order3_apply.hors")),
    ]
}

pub fn corpus() -> Vec<(&'static str, RecursionScheme)> {
    corpus_sources()
        .into_iter()
        .map(|(n, s)| (n, parse_scheme(s).expect("corpus schemes parse")))
        .collect()
}

/// Types of every terminal and non-terminal of `g`.
pub fn scheme_env(g: &RecursionScheme) -> TypeEnv {
    crate::comptree::scheme_type_env(g)
}

const TYPE_POOL: &[&str] = &[
    "o -> o",
    "o -> o",
    "o -> o -> o",
    "(o -> o) -> o",
    "(o -> o) -> o -> o",
    "o -> (o -> o) -> o",
    "(o -> o) -> (o -> o) -> o",
    "o -> (o -> o -> o) -> o",
    "(o -> o -> o) -> o",
    "((o -> o) -> o) -> o",
];

const TERMINALS: &[(&str, usize)] = &[("g", 2), ("h", 1), ("a", 0), ("b", 0)];

struct TermGen<'a, R: Rng> {
    rng: &'a mut R,
    symbols: Vec<(String, SimpleType, bool)>,
    nt_budget: usize,
}

impl<R: Rng> TermGen<'_, R> {
    /// A random term of type `target`; `None` when the depth runs out.
    fn term(&mut self, target: &SimpleType, depth: usize, params: &[(String, SimpleType)]) -> Option<AppTerm> {
        let mut cands: Vec<(String, usize, u32)> = Vec::new();
        let all = self
            .symbols
            .iter()
            .map(|(n, t, nt)| (n.clone(), t.clone(), *nt))
            .chain(params.iter().map(|(n, t)| (n.clone(), t.clone(), false)))
            .collect::<Vec<_>>();
        for (name, ty, is_nt) in &all {
            if *is_nt && self.nt_budget == 0 {
                continue;
            }
            if ty.arity() < target.arity() {
                continue;
            }
            let n = ty.arity() - target.arity();
            if ty.drop_args(n) != Some(target) {
                continue;
            }
            if depth == 0 && n > 0 {
                continue;
            }
            let weight = if params.iter().any(|(p, _)| p == name) { 4 } else { 2 };
            cands.push((name.clone(), n, weight));
        }
        let total: u32 = cands.iter().map(|c| c.2).sum();
        if total == 0 {
            return None;
        }
        let mut pick = self.rng.gen_range(0..total);
        let (name, n, _) = cands
            .into_iter()
            .find(|c| {
                if pick < c.2 {
                    true
                } else {
                    pick -= c.2;
                    false
                }
            })
            .expect("pick is in range");
        let ty = all.iter().find(|(s, ..)| *s == name).expect("candidate").1.clone();
        if all.iter().any(|(s, _, nt)| *s == name && *nt) {
            self.nt_budget -= 1;
        }
        let mut args = Vec::with_capacity(n);
        for a in ty.args().take(n).cloned().collect::<Vec<_>>() {
            args.push(self.term(&a, depth - 1, params)?);
        }
        Some(AppTerm::apply(AppTerm::sym(name), args))
    }
}

/// Source text of a small random scheme with at most four non-terminals
/// and no dead rules. Equal seeds give equal schemes.
pub fn random_scheme_source<R: Rng>(rng: &mut R) -> String {
    loop {
        if let Some(src) = try_random_scheme(rng) {
            if let Ok(g) = parse_scheme(&src) {
                if g.dead_rules().is_empty() {
                    return src;
                }
            }
        }
    }
}

pub fn random_scheme<R: Rng>(rng: &mut R) -> RecursionScheme {
    parse_scheme(&random_scheme_source(rng)).expect("generated schemes validate")
}

fn try_random_scheme<R: Rng>(rng: &mut R) -> Option<String> {
    let extra = rng.gen_range(1..=3);
    let names = ["F", "G", "H"];
    let mut nts: Vec<(String, SimpleType)> = vec![("S".into(), SimpleType::base())];
    for name in names.iter().take(extra) {
        let ty = parse_type(TYPE_POOL.choose(rng).expect("non-empty")).expect("pool types parse");
        nts.push((name.to_string(), ty));
    }
    let symbols: Vec<(String, SimpleType, bool)> = TERMINALS
        .iter()
        .map(|(n, r)| (n.to_string(), SimpleType::ranked(*r), false))
        .chain(nts.iter().map(|(n, t)| (n.clone(), t.clone(), true)))
        .collect();
    let mut src = String::from("%terminal g:2 h:1 a:0 b:0\n");
    for (n, t) in &nts {
        src.push_str(&format!("%nonterminal {} : {}\n", n, t));
    }
    src.push_str("%start S\n");
    for (n, t) in &nts {
        let params: Vec<(String, SimpleType)> = t
            .args()
            .enumerate()
            .map(|(i, a)| (format!("x{}", i + 1), a.clone()))
            .collect();
        let mut gen = TermGen {
            rng: &mut *rng,
            symbols: symbols.clone(),
            nt_budget: 2,
        };
        let depth = gen.rng.gen_range(2..=4);
        let body = gen.term(&SimpleType::base(), depth, &params)?;
        let ps: Vec<&str> = params.iter().map(|(p, _)| p.as_str()).collect();
        let lhs = if ps.is_empty() {
            n.clone()
        } else {
            format!("{} {}", n, ps.join(" "))
        };
        src.push_str(&format!("{} = {} .\n", lhs, body));
    }
    Some(src)
}

/// Raw-letter alphabet for stack experiments at machine order `n`:
/// non-prime lambdas `L0..Ln`, prime lambdas `P0..Pn`, variables `x0..x(n-1)`
/// and an application symbol `@`.
pub fn lemma_table(n: u32) -> OrderTable {
    let mut t = OrderTable::new();
    for o in 0..=n {
        t.add(&format!("L{}", o), SymbolClass::Lambda { order: o, prime: false });
        t.add(&format!("P{}", o), SymbolClass::Lambda { order: o, prime: true });
    }
    for o in 0..n {
        t.add(&format!("x{}", o), SymbolClass::Var { order: o });
    }
    t.add("@", SymbolClass::App);
    t
}

/// A stack of order `n` built by `steps` random operations that respect the
/// link convention. Undefined operations are skipped.
pub fn random_stack<R: Rng>(rng: &mut R, table: &OrderTable, n: u32, steps: usize) -> HoStack {
    let syms: Vec<Sym> = table.symbols().collect();
    let mut s = HoStack::empty(n);
    for _ in 0..steps {
        let roll = rng.gen_range(0..12);
        let next = match roll {
            0..=5 => {
                let x = *syms.choose(rng).expect("non-empty table");
                Ok(s.push1(StackSymbol {
                    sym: x,
                    link: convention_link(table, x, n),
                }))
            }
            6 | 7 if n >= 2 => s.push(rng.gen_range(2..=n)),
            8 | 9 => s.pop(1),
            10 if n >= 2 => s.pop(rng.gen_range(2..=n)),
            _ => s.collapse(),
        };
        if let Ok(t) = next {
            s = t;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hostack::SymbolInfo;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn corpus_parses() {
        assert!(corpus().len() >= 10);
    }

    #[test]
    fn random_schemes_are_deterministic_and_valid() {
        let a = random_scheme_source(&mut ChaCha8Rng::seed_from_u64(7));
        let b = random_scheme_source(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = random_scheme(&mut rng);
            assert!(g.dead_rules().is_empty());
            assert!(g.nonterminals().len() <= 4);
        }
    }

    #[test]
    fn random_stacks_follow_link_convention() {
        let t = lemma_table(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = random_stack(&mut rng, &t, 3, 40);
            assert_eq!(s.order(), 3);
            for sym in s.top_symbols() {
                if t.is_lambda(sym.sym) {
                    let expect = convention_link(&t, sym.sym, 3);
                    assert_eq!(sym.link.map(|l| l.order), expect.map(|l| l.order));
                }
            }
        }
    }
}
