use super::*;
use crate::comptree::{build_comp_graph, NodeKind};
use crate::cpda::{build_cpda, StepOutcome};
use crate::error::Error;
use crate::scheme::{is_safe_knu, parse_scheme, rewrite_tree};
use crate::testkit::{corpus, PHI_TWICE, NON_HOMOGENEOUS};
use crate::tree::ValueTree;

fn pair(src: &str, opts: DeriveOptions) -> (CompGraph, Machine, Result<PdaMachine>) {
    let g = build_comp_graph(&parse_scheme(src).unwrap());
    let m = build_cpda(&g).unwrap();
    let p = derive_pda(&m, &g, opts);
    (g, m, p)
}

/// Steps along the leftmost branch until the top is a variable accepted by `var`,
/// then returns the micro-step taken there.
fn micro_at_var(g: &CompGraph, m: &Machine, var: impl Fn(&str) -> bool) -> (crate::cpda::Configuration, crate::cpda::MicroStep) {
    let mut c = m.initial().clone();
    for _ in 0..10_000 {
        let top = g.node(c.stack.top1().unwrap().sym.into());
        if top.kind == NodeKind::Var && var(&top.label) {
            return (c.clone(), m.micro_step(&c));
        }
        c = match m.step(&c) {
            StepOutcome::Internal(n) => n,
            StepOutcome::Output { succs, .. } => succs[0].clone(),
            StepOutcome::Stuck(r) => panic!("{}", r),
        };
    }
    panic!("variable never reached")
}

#[test]
fn phi_twice_is_refused_unless_forced() {
    let (_, _, p) = pair(PHI_TWICE, DeriveOptions::default());
    assert!(matches!(p, Err(Error::NotIncrementallyBound(_))));
    let (_, _, p) = pair(PHI_TWICE, DeriveOptions { force: true, ..Default::default() });
    assert_eq!(p.unwrap().order(), 2);
}

#[test]
fn prime_binder_collapse_becomes_pop1() {
    let (g, _, p) = pair(PHI_TWICE, DeriveOptions { force: true, ..Default::default() });
    let p = p.unwrap();
    let (c, ms) = micro_at_var(&g, &p, |v| v == "phi");
    let k = ms.trace.iter().position(|(op, _)| matches!(op, Op::PopForCollapse { .. })).unwrap();
    let before = if k == 0 { c.stack.clone() } else { ms.trace[k - 1].1.clone() };
    assert!(g.node(before.top1().unwrap().sym.into()).prime);
    assert_eq!(ms.trace[k].1, before.pop(1).unwrap());
}

#[test]
fn non_prime_order1_binder_collapse_becomes_pop2() {
    let src = "%terminal h:1 a:0\n%nonterminal S : o\n%nonterminal F : (o -> o) -> o\n%start S\n\
               S = F h .\nF phi = phi a .";
    let (g, _, p) = pair(src, DeriveOptions::default());
    let p = p.unwrap();
    let (c, ms) = micro_at_var(&g, &p, |v| v.starts_with('x'));
    let k = ms.trace.iter().position(|(op, _)| matches!(op, Op::PopForCollapse { .. })).unwrap();
    let before = if k == 0 { c.stack.clone() } else { ms.trace[k - 1].1.clone() };
    let binder = g.node(before.top1().unwrap().sym.into());
    assert!(!binder.prime && binder.order == 1);
    assert_eq!(ms.trace[k].1, before.pop(2).unwrap());
    assert_eq!(p.generate_tree(4, 1000).to_string(), "(h (a))");
}

#[test]
fn lockstep_is_clean_on_corpus() {
    for (name, s) in corpus() {
        let g = build_comp_graph(&s);
        let m = build_cpda(&g).unwrap();
        let p = derive_pda(&m, &g, DeriveOptions::default()).unwrap();
        let r = lockstep_check(&m, &p, 2000);
        assert!(r.is_clean(), "{}: {:?}", name, r.first_mismatch);
        assert_eq!(lockstep_check(&m, &p, 0), LockstepReport::default());
    }
}

#[test]
fn pda_trees_match_rewriting() {
    for (name, s) in corpus() {
        let g = build_comp_graph(&s);
        let p = derive_pda(&build_cpda(&g).unwrap(), &g, DeriveOptions::default()).unwrap();
        assert_eq!(p.generate_tree(7, 100_000), rewrite_tree(&s, 7, 100_000), "{}", name);
        let norm = p.normalize().unwrap();
        assert!(norm.is_normalized());
        assert_eq!(norm.generate_tree(7, 1_000_000), p.generate_tree(7, 100_000), "{}", name);
    }
}

#[test]
fn hand_written_machines() {
    let p = parse_pda(
        "%order 1\n%states q0 q1\n%stack x\n%alphabet f:1 a:0\n\
         q0 bot -> output f q1\nq1 bot -> output a\n",
    )
    .unwrap();
    assert_eq!(p.generate_tree(5, 10).to_string(), "(f (a))");
    let p = parse_pda("%order 1\n%states q0\n%stack\n%alphabet a:0\nq0 bot -> popj 1 q0\n").unwrap();
    assert_eq!(p.generate_tree(5, 10), ValueTree::Divergent);
}

#[test]
fn format_errors() {
    let head = "%order 2\n%states q0\n%stack x\n%alphabet f:1\n";
    let dup = format!("{}q0 bot -> push1 x q0\nq0 bot -> pushj 2 q0\n", head);
    assert!(matches!(parse_pda(&dup), Err(Error::NonFunctionDelta(_))));
    for bad in [
        "q9 bot -> push1 x q0\n",
        "q0 bot -> push1 y q0\n",
        "q0 bot -> pushj 3 q0\n",
        "q0 bot -> pushj 1 q0\n",
        "q0 bot -> output f\n",
        "q0 bot -> jump q0\n",
        "%weird\n",
    ] {
        assert!(matches!(parse_pda(&format!("{}{}", head, bad)), Err(Error::Syntax { .. })), "{}", bad);
    }
    assert!(parse_pda("%states q0\n").is_err());
}

#[test]
fn text_round_trip() {
    for (_, s) in corpus().into_iter().take(4) {
        let g = build_comp_graph(&s);
        let p = derive_pda(&build_cpda(&g).unwrap(), &g, DeriveOptions::default()).unwrap();
        assert!(p.to_text().is_err());
        let text = p.normalize().unwrap().to_text().unwrap();
        let back = parse_pda(&text).unwrap();
        assert_eq!(back.to_text().unwrap(), text);
        assert_eq!(back.generate_tree(6, 1_000_000), rewrite_tree(&s, 6, 100_000));
    }
}

#[test]
fn kappa_types() {
    for m in 1..4 {
        for j in 0..4 {
            let k = kappa_type(j, m);
            assert_eq!(k.order(), j);
            assert!(k.is_homogeneous());
        }
    }
    assert_eq!(kappa_type(2, 1).to_string(), "(o -> o) -> o -> o");
}

#[test]
fn one_state_output_loop() {
    let p = parse_pda("%order 1\n%states q0\n%stack\n%alphabet f:1\nq0 bot -> output f q0\n").unwrap();
    let h = pda_to_hors(&p).unwrap();
    assert!(is_safe_knu(&h));
    assert_eq!(rewrite_tree(&h, 4, 1000).to_string(), "(f (f (f (f (CUT)))))");
    assert_eq!(rewrite_tree(&h, 8, 1000), p.generate_tree(8, 1000));
}

#[test]
fn order2_push_pop_around_output() {
    let src = "%order 2\n%states q0 q1 q2 q3\n%stack x\n%alphabet f:1 g:2 e:0\n%init x\n\
               q0 x -> pushj 2 q1\nq1 x -> output g q2 q3\nq2 x -> popj 2 q0\nq3 x -> popj 1 q3\n\
               q3 bot -> output e\n";
    let p = parse_pda(src).unwrap();
    let h = pda_to_hors(&p).unwrap();
    assert!(is_safe_knu(&h));
    assert_eq!(h.order(), 2);
    assert_eq!(rewrite_tree(&h, 8, 10_000), p.generate_tree(8, 10_000));
}

#[test]
fn roundtrip_schemes() {
    let g = parse_scheme("%terminal a:0\n%nonterminal S : o\n%start S\nS = a .").unwrap();
    let r = roundtrip_safe_scheme(&g).unwrap();
    assert!(is_safe_knu(&r));
    assert_eq!(rewrite_tree(&r, 3, 100), ValueTree::leaf("a"));
    let g = parse_scheme(NON_HOMOGENEOUS).unwrap();
    let r = roundtrip_safe_scheme(&g).unwrap();
    assert!(is_safe_knu(&r));
    assert!(r.all_homogeneous());
    assert_eq!(rewrite_tree(&r, 8, 1_000_000), rewrite_tree(&g, 8, 100_000));
}
