use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::types::{AppTerm, SimpleType};

use super::{RecursionScheme, SymbolKind};

/// An operand-position subterm containing a parameter of strictly smaller order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub subterm: String,
    pub subterm_order: u32,
    pub param: String,
    pub param_order: u32,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {}: operand `{}` (order {}) contains parameter `{}` of order {}",
            self.rule, self.subterm, self.subterm_order, self.param, self.param_order
        )
    }
}

/// Syntactic part of safety: no operand-position subterm contains a parameter
/// of order strictly less than the subterm's own order. Homogeneity is not checked.
pub fn syntactic_safety_check(g: &RecursionScheme) -> Vec<Violation> {
    let mut out = Vec::new();
    for rule in g.rules() {
        let params: HashMap<&str, &SimpleType> =
            rule.params.iter().map(|(n, t)| (n.as_str(), t)).collect();
        let ty_of = |s: &str| -> SimpleType {
            if let Some(t) = params.get(s) {
                return (*t).clone();
            }
            match g.lookup(s) {
                Some(SymbolKind::Terminal(i)) => g.terminals()[i].ty(),
                Some(SymbolKind::NonTerminal(i)) => g.nonterminals()[i].ty.clone(),
                None => unreachable!("validated scheme"),
            }
        };
        scan(&rule.body, &ty_of, &params, &rule.head, &mut out);
    }
    out
}

/// Returns the type of `t`; records a violation for every operand found below it.
fn scan(
    t: &AppTerm,
    ty_of: &dyn Fn(&str) -> SimpleType,
    params: &HashMap<&str, &SimpleType>,
    rule: &str,
    out: &mut Vec<Violation>,
) -> SimpleType {
    match t {
        AppTerm::Sym(s) => ty_of(s),
        AppTerm::App(m, n) => {
            let fun = scan(m, ty_of, params, rule, out);
            let arg = scan(n, ty_of, params, rule, out);
            let order = arg.order();
            let mut lowest: Option<(&str, u32)> = None;
            n.for_each_symbol(&mut |s| {
                if let Some(pt) = params.get(s) {
                    let o = pt.order();
                    if o < order && lowest.is_none_or(|(_, lo)| o < lo) {
                        lowest = Some((s, o));
                    }
                }
            });
            if let Some((param, param_order)) = lowest {
                out.push(Violation {
                    rule: rule.to_string(),
                    subterm: n.to_string(),
                    subterm_order: order,
                    param: param.to_string(),
                    param_order,
                });
            }
            fun.split().expect("validated scheme").1.clone()
        }
    }
}

/// Safe in the original sense: homogeneous non-terminal types and no syntactic violation.
pub fn is_safe_knu(g: &RecursionScheme) -> bool {
    g.all_homogeneous() && syntactic_safety_check(g).is_empty()
}
