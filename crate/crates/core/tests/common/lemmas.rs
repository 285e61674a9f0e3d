//! Properties of order-decompositions and stack safety, each checked on
//! random stacks and on pieces of reachable automaton configurations, with
//! both sides recomputed by the reference oracle.

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use hpl_core::comptree::build_comp_graph;
use hpl_core::cpda::{build_cpda, StepOutcome};
use hpl_core::hostack::{is_l_safe, order_decomposition, HoStack, Link, OrderTable, StackSymbol, Sym, SymbolInfo};
use hpl_core::testkit::{corpus, lemma_table, random_stack};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{oracle, run_seeded, Outcome};

pub const CASES: u32 = 10_000;

struct Case {
    info: Arc<OrderTable>,
    /// Order of the machine the stack belongs to.
    n: u32,
    s: HoStack,
    rng: ChaCha8Rng,
}

type Pooled = (Arc<OrderTable>, u32, HoStack);

/// Stacks of reachable configurations of the corpus machines, with their
/// top sub-stacks and a prefix of each.
fn reachable_pool() -> &'static [Pooled] {
    static POOL: OnceLock<Vec<Pooled>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for (_, g) in corpus() {
            let cg = build_comp_graph(&g);
            let m = build_cpda(&cg).expect("corpus machines build");
            let table = Arc::new(m.table().clone());
            let n = m.order();
            let mut queue = VecDeque::from([m.initial().clone()]);
            for _ in 0..300 {
                let Some(c) = queue.pop_front() else { break };
                let s = c.stack.clone();
                let mut add = |t: HoStack| out.push((table.clone(), n, t));
                add(s.clone());
                for k in 2..=s.order() {
                    if let Ok(t) = s.top_stack(k) {
                        add(t);
                    }
                }
                let len = s.top_symbols().len();
                if len > 1 {
                    if let Ok(p) = s.prefix_top(len / 2) {
                        add(p);
                    }
                }
                match m.step(&c) {
                    StepOutcome::Internal(next) => queue.push_back(next),
                    StepOutcome::Output { succs, .. } => queue.extend(succs),
                    StepOutcome::Stuck(_) => {}
                }
            }
        }
        out
    })
}

fn lemma_tables() -> &'static [Arc<OrderTable>] {
    static TABLES: OnceLock<Vec<Arc<OrderTable>>> = OnceLock::new();
    TABLES.get_or_init(|| (1..=3).map(|n| Arc::new(lemma_table(n))).collect())
}

fn case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(1..=3u32);
        let info = lemma_tables()[n as usize - 1].clone();
        let steps = rng.gen_range(0..48);
        let s = random_stack(&mut rng, &info, n, steps);
        Case { info, n, s, rng }
    } else {
        let pool = reachable_pool();
        let (info, n, s) = pool[rng.gen_range(0..pool.len())].clone();
        Case { info, n, s, rng }
    }
}

impl Case {
    /// The stack itself or one of its top sub-stacks, of order at least `min`.
    fn sub(&mut self, min: u32) -> Option<HoStack> {
        let o = self.s.order();
        if o < min {
            return None;
        }
        let k = self.rng.gen_range(min..=o);
        if k == o {
            Some(self.s.clone())
        } else {
            self.s.top_stack(k + 1).ok()
        }
    }

    fn symbol(&mut self, lambda: bool) -> Option<Sym> {
        let syms: Vec<Sym> = self.info.symbols().filter(|&s| self.info.is_lambda(s) == lambda).collect();
        syms.choose(&mut self.rng).copied()
    }

    fn link(&mut self) -> Option<Link> {
        if self.rng.gen_range(0..4) == 0 {
            None
        } else {
            Some(Link::new(self.rng.gen_range(1..=self.n), self.rng.gen_range(1..=3)))
        }
    }
}

/// Library safety, checked against the oracle.
fn safe(s: &HoStack, l: u32, info: &dyn SymbolInfo) -> Result<bool, TestCaseError> {
    let fast = is_l_safe(s, l, info).is_ok();
    prop_assert_eq!(fast, oracle::is_l_safe(s, l, info), "safety of {:?} at {}", s, l);
    Ok(fast)
}

/// Library decomposition, checked against the oracle.
fn dec(s: &HoStack, l: u32, info: &dyn SymbolInfo) -> Result<Vec<(usize, StackSymbol)>, TestCaseError> {
    let fast: Vec<_> = order_decomposition(s, l, info).iter().map(|e| (e.position, e.symbol)).collect();
    let slow = oracle::orddec(s, l, info);
    prop_assert_eq!(&fast, &slow);
    Ok(slow)
}

pub fn orddec_push_lambda() -> Outcome {
    run_seeded("orddec after pushing a lambda", CASES, |seed| {
        let mut c = case(seed);
        let Some(a) = c.symbol(true) else { return Ok(false) };
        let link = c.link();
        let l = c.rng.gen_range(0..=c.n);
        let info = &*c.info;
        let before = dec(&c.s, l, info)?;
        let after = dec(&c.s.push1(StackSymbol { sym: a, link }), l, info)?;
        let oa = info.order(a);
        let expected = if oa <= l {
            before
        } else {
            let mut kept: Vec<_> = before.into_iter().filter(|(_, x)| info.order(x.sym) > oa).collect();
            kept.push((c.s.top_symbols().len(), StackSymbol { sym: a, link }));
            kept
        };
        prop_assert_eq!(after, expected);
        Ok(true)
    })
}

pub fn orddec_push_non_lambda() -> Outcome {
    run_seeded("orddec after pushing a non-lambda", CASES, |seed| {
        let mut c = case(seed);
        let Some(a) = c.symbol(false) else { return Ok(false) };
        let link = c.link();
        let l = c.rng.gen_range(0..=c.n);
        let info = &*c.info;
        let pushed = c.s.push1(StackSymbol { sym: a, link });
        prop_assert_eq!(dec(&pushed, l, info)?, dec(&c.s, l, info)?);
        Ok(true)
    })
}

pub fn orddec_pop_non_lambda() -> Outcome {
    run_seeded("orddec after popping a non-lambda", CASES, |seed| {
        let c = case(seed);
        let info = &*c.info;
        let Ok(top) = c.s.top1() else { return Ok(false) };
        if info.is_lambda(top.sym) {
            return Ok(false);
        }
        let popped = c.s.pop(1).expect("non-empty top 1-stack");
        for l in 0..=c.n {
            prop_assert_eq!(dec(&popped, l, info)?, dec(&c.s, l, info)?);
        }
        Ok(true)
    })
}

pub fn orddec_prefix_monotone() -> Outcome {
    run_seeded("orddec prefix monotonicity", CASES, |seed| {
        let mut c = case(seed);
        let l = c.rng.gen_range(0..=c.n);
        let l2 = c.rng.gen_range(l + 1..=c.n + 1);
        let info = &*c.info;
        let (low, high) = (dec(&c.s, l, info)?, dec(&c.s, l2, info)?);
        prop_assert!(high.len() <= low.len() && low[..high.len()] == high[..]);
        Ok(true)
    })
}

pub fn stacksafety_immediate() -> Outcome {
    run_seeded("safety is upward closed in the threshold", CASES, |seed| {
        let mut c = case(seed);
        let l = c.rng.gen_range(0..=c.n);
        let info = &*c.info;
        if !safe(&c.s, l, info)? {
            return Ok(false);
        }
        for k in l..=c.n {
            prop_assert!(safe(&c.s, k, info)?, "{}-safe but not {}-safe", l, k);
        }
        Ok(true)
    })
}

/// All four parts; the lambda part in the form that holds for every stack
/// (see the `literal_lambda_push_counterexample` test).
pub fn push1pop1_preserves_safety() -> Outcome {
    run_seeded("push1/pop1/top preserve safety", CASES, |seed| {
        let mut c = case(seed);
        let l = c.rng.gen_range(0..=c.n);
        let s = c.s.clone();
        let info = c.info.clone();
        let info = &*info;
        if !safe(&s, l, info)? {
            return Ok(false);
        }
        if s.order() >= 2 {
            let t = s.top_stack(s.order()).expect("order checked");
            prop_assert!(safe(&t, l, info)?, "top of an l-safe stack");
        }
        if let Ok(top) = s.top1() {
            if !info.is_lambda(top.sym) {
                prop_assert!(safe(&s.pop(1).unwrap(), l, info)?, "pop1 of a non-lambda");
            }
        }
        if let Some(a) = c.symbol(false) {
            let link = Link::new(c.rng.gen_range(1..=c.n), c.rng.gen_range(1..=3));
            let pushed = s.push1(StackSymbol { sym: a, link: Some(link) });
            prop_assert!(safe(&pushed, l, info)?, "push of a non-lambda");
        }
        if let Some(a) = c.symbol(true) {
            let pushed = s.push1(StackSymbol::linked(a, 1, 1));
            prop_assert!(safe(&pushed, l, info)?, "push of a lambda with link (1,1)");
            if info.order(a) >= l && safe(&s, 0, info)? {
                prop_assert!(safe(&pushed, 0, info)?, "push of a lambda onto a safe stack");
            }
        }
        Ok(true)
    })
}

pub fn incrk_qsafe() -> Outcome {
    run_seeded("renumbering raises the safety threshold", CASES, |seed| {
        let mut c = case(seed);
        if c.n < 2 {
            return Ok(false);
        }
        let Some(t) = c.sub(1).filter(|t| t.order() < c.n) else { return Ok(false) };
        let l = c.rng.gen_range(0..c.n);
        let q = c.rng.gen_range(0..=c.n);
        let info = &*c.info;
        if !safe(&t, q, info)? {
            return Ok(false);
        }
        let r = t.renumber(c.n - l + 1);
        prop_assert!(safe(&r, l.max(q), info)?, "renumber({}) of a {}-safe stack", c.n - l + 1, q);
        Ok(true)
    })
}

pub fn cons_qsafety() -> Outcome {
    run_seeded("safety from the top element and the rest", CASES, |seed| {
        let mut c = case(seed);
        let Some(s) = c.sub(2) else { return Ok(false) };
        let k = s.order();
        let l = c.rng.gen_range(0..=c.n);
        let info = &*c.info;
        let Ok(rest) = s.pop(k) else { return Ok(false) };
        let top = s.top_stack(k).expect("order checked");
        if !safe(&rest, 0, info)? || !safe(&top, l, info)? {
            return Ok(false);
        }
        prop_assert!(safe(&s, l, info)?);
        Ok(true)
    })
}

pub fn pushj_safe_implies_l_safe() -> Outcome {
    run_seeded("push_j of a safe stack", CASES, |seed| {
        let mut c = case(seed);
        if c.n < 2 {
            return Ok(false);
        }
        let l = c.rng.gen_range(1..c.n);
        let j = c.n - l + 1;
        let Some(s) = c.sub(j) else { return Ok(false) };
        let info = &*c.info;
        if !safe(&s, 0, info)? {
            return Ok(false);
        }
        prop_assert!(safe(&s.push(j).expect("order checked"), l, info)?, "push_{} at l = {}", j, l);
        Ok(true)
    })
}

pub fn all() -> Vec<Outcome> {
    vec![
        orddec_push_lambda(),
        orddec_push_non_lambda(),
        orddec_pop_non_lambda(),
        orddec_prefix_monotone(),
        stacksafety_immediate(),
        push1pop1_preserves_safety(),
        incrk_qsafe(),
        cons_qsafety(),
        pushj_safe_implies_l_safe(),
    ]
}
