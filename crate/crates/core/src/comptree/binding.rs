//! Incremental binding: every variable is bound by the first lambda above it
//! whose order is strictly greater than the variable's.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme::{RecursionScheme, SymbolKind};

use super::{eta_long_lambda, scheme_type_env, CompGraph, EtaTerm, NodeKind};

pub const DEFAULT_UNFOLD_NODE_BOUND: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IbViolation {
    pub rule: String,
    pub variable: String,
    pub variable_order: u32,
    /// Label of the lambda that intercepts the variable.
    pub lambda: String,
    pub lambda_order: u32,
}

impl fmt::Display for IbViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {}: variable `{}` (order {}) lies below `{}` (order {}) before its binder",
            self.rule, self.variable, self.variable_order, self.lambda, self.lambda_order
        )
    }
}

/// Static check on the rule trees: reports every lambda of order greater than
/// `ord(v)` strictly between a variable `v` and its binder.
pub fn check_incremental_binding_static(cg: &CompGraph) -> Vec<IbViolation> {
    let mut out = Vec::new();
    for n in cg.nodes() {
        let Some(v) = n.var else { continue };
        let mut cur = n.parent.expect("variables have parents");
        while cur != v.binder {
            let p = cg.node(cur);
            if p.kind == NodeKind::Lambda && p.order > n.order {
                out.push(IbViolation {
                    rule: cg.rule_name(n.rule).to_string(),
                    variable: n.label.clone(),
                    variable_order: n.order,
                    lambda: p.to_string(),
                    lambda_order: p.order,
                });
            }
            cur = p.parent.expect("binder lies on the path to the rule root");
        }
    }
    out
}

#[derive(Debug)]
struct UNode {
    parent: Option<usize>,
    /// Lambda nodes: bound names with their orders.
    lambda: Option<Vec<(String, u32)>>,
    /// Variable nodes: the name.
    var: Option<String>,
    rule: usize,
}

struct Unfolder<'a> {
    g: &'a RecursionScheme,
    rules: Vec<EtaTerm>,
    nodes: Vec<UNode>,
    bound: usize,
}

impl Unfolder<'_> {
    fn push(&mut self, n: UNode) -> Result<usize> {
        if self.nodes.len() >= self.bound {
            return Err(Error::BudgetExceeded(self.bound));
        }
        self.nodes.push(n);
        Ok(self.nodes.len() - 1)
    }

    /// Adds the tree of the lambda term `t` below `parent`. Non-terminal heads
    /// are replaced by their rule while `gen > 0`; otherwise they stay constants.
    fn lambda(&mut self, t: &EtaTerm, parent: Option<usize>, gen: usize, rule: usize) -> Result<()> {
        let binders = t.binders.iter().map(|(n, ty)| (n.clone(), ty.order())).collect();
        let lam = self.push(UNode {
            parent,
            lambda: Some(binders),
            var: None,
            rule,
        })?;
        let bound_here = self.is_variable(lam, &t.head);
        let head = self.push(UNode {
            parent: Some(lam),
            lambda: None,
            var: bound_here.then(|| t.head.clone()),
            rule,
        })?;
        if !bound_here && gen > 0 {
            if let Some(SymbolKind::NonTerminal(n)) = self.g.lookup(&t.head) {
                let body = self.rules[n].clone();
                self.lambda(&body, Some(head), gen - 1, n)?;
            }
        }
        for a in &t.args {
            self.lambda(a, Some(head), gen, rule)?;
        }
        Ok(())
    }

    /// A name is a variable iff some lambda above binds it; terminals and
    /// non-terminals are never bound.
    fn is_variable(&self, from: usize, name: &str) -> bool {
        self.binder_of(from, name).is_some()
    }

    fn binder_of(&self, from: usize, name: &str) -> Option<usize> {
        let mut cur = Some(from);
        while let Some(i) = cur {
            if let Some(bs) = &self.nodes[i].lambda {
                if bs.iter().any(|(n, _)| n == name) {
                    return Some(i);
                }
            }
            cur = self.nodes[i].parent;
        }
        None
    }
}

fn lambda_order(bs: &[(String, u32)]) -> u32 {
    bs.iter().map(|(_, o)| o + 1).max().unwrap_or(0)
}

/// Unfolds the computation tree of `Λ(S)` `k` times and checks every
/// variable against the literal definition. Non-terminals left after `k`
/// unfoldings and terminals are constants, not variables.
pub fn check_incremental_binding_unfold(
    g: &RecursionScheme,
    k: usize,
    node_bound: usize,
) -> Result<Vec<IbViolation>> {
    let env = scheme_type_env(g);
    let rules = g
        .rules()
        .iter()
        .map(|r| eta_long_lambda(&g.lambda_of(&r.head).expect("rule exists"), &env))
        .collect::<Result<Vec<_>>>()?;
    let mut u = Unfolder {
        g,
        rules,
        nodes: Vec::new(),
        bound: node_bound,
    };
    let start = u.rules[g.start_index()].clone();
    u.lambda(&start, None, k, g.start_index())?;

    let mut out = Vec::new();
    for (i, n) in u.nodes.iter().enumerate() {
        let Some(name) = &n.var else { continue };
        let binder = u.binder_of(i, name).expect("variables are bound");
        let var_order = u.nodes[binder]
            .lambda
            .as_ref()
            .unwrap()
            .iter()
            .find(|(b, _)| b == name)
            .unwrap()
            .1;
        let mut cur = n.parent;
        while let Some(j) = cur {
            if let Some(bs) = &u.nodes[j].lambda {
                let lo = lambda_order(bs);
                if lo > var_order {
                    if j != binder {
                        let names: Vec<&str> = bs.iter().map(|(b, _)| b.as_str()).collect();
                        let v = IbViolation {
                            rule: g.rules()[n.rule].head.clone(),
                            variable: name.clone(),
                            variable_order: var_order,
                            lambda: format!("λ{}", names.join(" ")),
                            lambda_order: lo,
                        };
                        if !out.contains(&v) {
                            out.push(v);
                        }
                    }
                    break;
                }
            }
            cur = u.nodes[j].parent;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comptree::build_comp_graph;
    use crate::scheme::parse_scheme;
    use crate::testkit::{PHI_TWICE, NON_HOMOGENEOUS, NON_IB};

    #[test]
    fn phi_twice_is_not_incrementally_bound() {
        // In `H z = F (g z)` the order-1 lambda of `λx. g z x` sits between z
        // and its binder.
        let g = parse_scheme(PHI_TWICE).unwrap();
        let st = check_incremental_binding_static(&build_comp_graph(&g));
        assert_eq!(st.len(), 1);
        assert_eq!((st[0].rule.as_str(), st[0].variable.as_str()), ("H", "z"));
        assert_eq!((st[0].variable_order, st[0].lambda_order), (0, 1));
        let un = check_incremental_binding_unfold(&g, 3, DEFAULT_UNFOLD_NODE_BOUND).unwrap();
        assert!(un.iter().all(|v| v.rule == "H" && v.variable == "z"));
        assert!(!un.is_empty());
    }

    #[test]
    fn non_homogeneous_fixture_is_incrementally_bound() {
        let g = parse_scheme(NON_HOMOGENEOUS).unwrap();
        assert!(check_incremental_binding_static(&build_comp_graph(&g)).is_empty());
        for k in 0..4 {
            assert!(check_incremental_binding_unfold(&g, k, DEFAULT_UNFOLD_NODE_BOUND)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn open_term_convention_at_k0() {
        let g = parse_scheme(NON_IB).unwrap();
        assert!(check_incremental_binding_unfold(&g, 0, DEFAULT_UNFOLD_NODE_BOUND)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn engineered_violation_found_by_both_checks() {
        let g = parse_scheme(NON_IB).unwrap();
        let cg = build_comp_graph(&g);
        let st = check_incremental_binding_static(&cg);
        assert_eq!(st.len(), 1);
        assert_eq!((st[0].rule.as_str(), st[0].variable.as_str()), ("N", "z"));
        assert_eq!((st[0].variable_order, st[0].lambda_order), (0, 1));
        let k = g.nonterminals().len();
        let un = check_incremental_binding_unfold(&g, k, DEFAULT_UNFOLD_NODE_BOUND).unwrap();
        assert!(!un.is_empty());
        assert!(un.iter().all(|v| v.rule == "N" && v.variable == "z"));
    }

    #[test]
    fn no_variables() {
        let g = parse_scheme("%terminal a:0\n%nonterminal S : o\n%start S\nS = a .").unwrap();
        assert!(check_incremental_binding_static(&build_comp_graph(&g)).is_empty());
    }

    #[test]
    fn node_bound_is_enforced() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        assert_eq!(
            check_incremental_binding_unfold(&g, 10, 20),
            Err(Error::BudgetExceeded(20))
        );
    }
}
