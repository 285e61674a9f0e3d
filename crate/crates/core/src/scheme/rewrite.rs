//! Reference tree generator: outermost (OI) rewriting of the head redex.

use std::sync::Arc;

use crate::par::Exec;
use crate::tree::ValueTree;
use crate::types::AppTerm;

use super::{RecursionScheme, SymbolKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Head {
    Terminal(usize),
    NonTerminal(usize),
}

/// Closed term in spine form `head arg1 ... argk`.
#[derive(Debug)]
struct Term {
    head: Head,
    args: Vec<Arc<Term>>,
}

impl Drop for Term {
    // Lazily built arguments can nest very deeply; drop them without recursion.
    fn drop(&mut self) {
        let mut stack = std::mem::take(&mut self.args);
        while let Some(t) = stack.pop() {
            if let Ok(mut inner) = Arc::try_unwrap(t) {
                stack.append(&mut inner.args);
            }
        }
    }
}

#[derive(Debug)]
enum TmplHead {
    Sym(Head),
    Param(usize),
}

/// Rule body with parameters as indices.
#[derive(Debug)]
struct Tmpl {
    head: TmplHead,
    args: Vec<Tmpl>,
}

struct Compiled {
    bodies: Vec<Tmpl>,
    arities: Vec<usize>,
    names: Vec<String>,
    start: usize,
}

fn compile(g: &RecursionScheme) -> Compiled {
    let bodies = g
        .rules()
        .iter()
        .map(|r| {
            let params: Vec<&str> = r.params.iter().map(|(n, _)| n.as_str()).collect();
            compile_term(g, &params, &r.body)
        })
        .collect();
    Compiled {
        bodies,
        arities: g.rules().iter().map(|r| r.params.len()).collect(),
        names: g.terminals().iter().map(|t| t.name.clone()).collect(),
        start: g.start_index(),
    }
}

fn compile_term(g: &RecursionScheme, params: &[&str], t: &AppTerm) -> Tmpl {
    let (head, args) = t.spine();
    let head = match params.iter().position(|p| *p == head) {
        Some(i) => TmplHead::Param(i),
        None => match g.lookup(head).expect("validated scheme") {
            SymbolKind::Terminal(i) => TmplHead::Sym(Head::Terminal(i)),
            SymbolKind::NonTerminal(i) => TmplHead::Sym(Head::NonTerminal(i)),
        },
    };
    Tmpl {
        head,
        args: args.into_iter().map(|a| compile_term(g, params, a)).collect(),
    }
}

fn instantiate(t: &Tmpl, actuals: &[Arc<Term>]) -> Arc<Term> {
    let args: Vec<Arc<Term>> = t.args.iter().map(|a| instantiate(a, actuals)).collect();
    match t.head {
        TmplHead::Sym(h) => Arc::new(Term { head: h, args }),
        TmplHead::Param(i) if args.is_empty() => actuals[i].clone(),
        TmplHead::Param(i) => {
            let p = &actuals[i];
            let mut all = p.args.clone();
            all.extend(args);
            Arc::new(Term { head: p.head, args: all })
        }
    }
}

impl Compiled {
    /// Rewrites the head redex until a terminal is exposed, or gives up after `budget` steps.
    fn expose(&self, mut t: Arc<Term>, budget: u64) -> Option<Arc<Term>> {
        let mut steps = 0u64;
        loop {
            match t.head {
                Head::Terminal(_) => return Some(t),
                Head::NonTerminal(f) => {
                    if steps >= budget {
                        return None;
                    }
                    steps += 1;
                    let m = self.arities[f];
                    let body = instantiate(&self.bodies[f], &t.args[..m]);
                    t = if t.args.len() == m {
                        body
                    } else {
                        let mut all = body.args.clone();
                        all.extend(t.args[m..].iter().cloned());
                        Arc::new(Term { head: body.head, args: all })
                    };
                }
            }
        }
    }

    fn generate(&self, t: Arc<Term>, depth: usize, budget: u64, exec: Exec) -> ValueTree {
        if depth == 0 {
            return ValueTree::Cut;
        }
        let Some(t) = self.expose(t, budget) else {
            return ValueTree::Divergent;
        };
        let Head::Terminal(f) = t.head else { unreachable!() };
        let children = exec.map(&t.args, |a| self.generate(a.clone(), depth - 1, budget, exec));
        ValueTree::node(self.names[f].clone(), children)
    }
}

/// Depth-truncated value tree by outermost rewriting. `depth` counts terminal
/// levels; positions at level `depth` become `CUT`. `budget` bounds the rewrite
/// steps spent exposing each node.
pub fn rewrite_tree(g: &RecursionScheme, depth: usize, budget: u64) -> ValueTree {
    rewrite_tree_with(g, depth, budget, Exec::default())
}

pub fn rewrite_tree_with(g: &RecursionScheme, depth: usize, budget: u64, exec: Exec) -> ValueTree {
    let c = compile(g);
    let start = Arc::new(Term {
        head: Head::NonTerminal(c.start),
        args: Vec::new(),
    });
    c.generate(start, depth, budget, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::parse_scheme;
    use crate::testkit::PHI_TWICE;

    #[test]
    fn phi_twice_prefix() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        assert_eq!(
            rewrite_tree(&g, 5, 1000).to_string(),
            "(g (a) (g (a) (h (h (h (CUT))))))"
        );
        assert_eq!(rewrite_tree(&g, 4, 1000).to_string(), "(g (a) (g (a) (h (h (CUT)))))");
        assert_eq!(rewrite_tree(&g, 1, 1000).to_string(), "(g (CUT) (CUT))");
        assert_eq!(rewrite_tree(&g, 0, 1000).to_string(), "(CUT)");
    }

    #[test]
    fn leaf_and_divergence() {
        let g = parse_scheme("%terminal a:0\n%nonterminal S : o\n%start S\nS = a .").unwrap();
        assert_eq!(rewrite_tree(&g, 3, 10), ValueTree::leaf("a"));
        let g = parse_scheme("%terminal a:0\n%nonterminal S : o\n%start S\nS = S .").unwrap();
        assert_eq!(rewrite_tree(&g, 3, 100), ValueTree::Divergent);
    }

    #[test]
    fn deep_lazy_arguments_drop_without_overflow() {
        let src = "%terminal h:1 a:0\n%nonterminal S : o\n%nonterminal F : o -> o\n%start S\n\
                   S = F a .\nF x = F (h x) .";
        let g = parse_scheme(src).unwrap();
        assert_eq!(rewrite_tree(&g, 2, 200_000), ValueTree::Divergent);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        assert_eq!(
            rewrite_tree_with(&g, 8, 10_000, Exec::Sequential),
            rewrite_tree_with(&g, 8, 10_000, Exec::Parallel)
        );
    }
}
