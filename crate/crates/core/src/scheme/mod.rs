//! Higher-order recursion schemes.

mod parse;
mod rewrite;
mod safety;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::types::{check_term, AppTerm, RankedSymbol, SimpleType, TypeEnv};

pub use parse::parse_scheme;
pub use rewrite::{rewrite_tree, rewrite_tree_with};
pub use safety::{is_safe_knu, syntactic_safety_check, Violation};

/// `F z1 ... zm = body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: String,
    pub params: Vec<(String, SimpleType)>,
    pub body: AppTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonTerminal {
    pub name: String,
    pub ty: SimpleType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Terminal(usize),
    NonTerminal(usize),
}

/// A validated recursion scheme. `rules[i]` is the rule of `nonterminals[i]`.
#[derive(Debug, Clone)]
pub struct RecursionScheme {
    terminals: Vec<RankedSymbol>,
    nonterminals: Vec<NonTerminal>,
    rules: Vec<Rule>,
    start: usize,
    index: HashMap<String, SymbolKind>,
}

/// The curried rule `λz1 ... zm. body`; `m = 0` gives a dummy lambda.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaTerm {
    pub params: Vec<(String, SimpleType)>,
    pub body: AppTerm,
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ")?;
        let names: Vec<&str> = self.params.iter().map(|(n, _)| n.as_str()).collect();
        write!(f, "{}. {}", names.join(" "), self.body)
    }
}

/// Unvalidated rule as written in a scheme file: parameter names only.
#[derive(Debug, Clone)]
pub struct RawRule {
    pub head: String,
    pub params: Vec<String>,
    pub body: AppTerm,
    pub line: usize,
}

impl RecursionScheme {
    /// Validates and assembles a scheme.
    pub fn new(
        terminals: Vec<RankedSymbol>,
        nonterminals: Vec<NonTerminal>,
        rules: Vec<RawRule>,
        start: &str,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, t) in terminals.iter().enumerate() {
            if index.insert(t.name.clone(), SymbolKind::Terminal(i)).is_some() {
                return Err(Error::Validation(format!("duplicate terminal `{}`", t.name)));
            }
        }
        for (i, nt) in nonterminals.iter().enumerate() {
            if index.insert(nt.name.clone(), SymbolKind::NonTerminal(i)).is_some() {
                return Err(Error::Validation(format!("duplicate symbol `{}`", nt.name)));
            }
        }
        let start_idx = match index.get(start) {
            Some(SymbolKind::NonTerminal(i)) => *i,
            _ => {
                return Err(Error::Validation(format!(
                    "start symbol `{}` is not a declared non-terminal",
                    start
                )))
            }
        };
        if !nonterminals[start_idx].ty.is_base() {
            return Err(Error::Validation(format!(
                "start symbol `{}` must have type o, found {}",
                start, nonterminals[start_idx].ty
            )));
        }

        let mut slots: Vec<Option<Rule>> = vec![None; nonterminals.len()];
        for raw in rules {
            let i = match index.get(&raw.head) {
                Some(SymbolKind::NonTerminal(i)) => *i,
                _ => {
                    return Err(Error::Validation(format!(
                        "line {}: rule for undeclared non-terminal `{}`",
                        raw.line, raw.head
                    )))
                }
            };
            if slots[i].is_some() {
                return Err(Error::Validation(format!(
                    "line {}: second rule for `{}`",
                    raw.line, raw.head
                )));
            }
            let ty = &nonterminals[i].ty;
            if raw.params.len() != ty.arity() {
                return Err(Error::Validation(format!(
                    "line {}: `{}` has type {} and needs {} parameters, found {}",
                    raw.line,
                    raw.head,
                    ty,
                    ty.arity(),
                    raw.params.len()
                )));
            }
            let mut env: TypeEnv = terminals
                .iter()
                .map(|t| (t.name.clone(), t.ty()))
                .chain(nonterminals.iter().map(|n| (n.name.clone(), n.ty.clone())))
                .collect();
            let mut params = Vec::with_capacity(raw.params.len());
            let mut seen = HashSet::new();
            for (p, pty) in raw.params.iter().zip(ty.args()) {
                if !seen.insert(p.as_str()) {
                    return Err(Error::Validation(format!(
                        "line {}: repeated parameter `{}` in rule for `{}`",
                        raw.line, p, raw.head
                    )));
                }
                if index.contains_key(p) {
                    return Err(Error::Validation(format!(
                        "line {}: parameter `{}` shadows a declared symbol",
                        raw.line, p
                    )));
                }
                env.insert(p.clone(), pty.clone());
                params.push((p.clone(), pty.clone()));
            }
            let body_ty = check_term(&raw.body, &env).map_err(|e| {
                Error::Validation(format!("line {}: rule for `{}`: {}", raw.line, raw.head, e))
            })?;
            if !body_ty.is_base() {
                return Err(Error::Validation(format!(
                    "line {}: body of `{}` has type {}, expected o",
                    raw.line, raw.head, body_ty
                )));
            }
            slots[i] = Some(Rule {
                head: raw.head,
                params,
                body: raw.body,
            });
        }
        let mut rules = Vec::with_capacity(slots.len());
        for (slot, nt) in slots.into_iter().zip(&nonterminals) {
            match slot {
                Some(r) => rules.push(r),
                None => {
                    return Err(Error::Validation(format!("missing rule for `{}`", nt.name)))
                }
            }
        }
        Ok(RecursionScheme {
            terminals,
            nonterminals,
            rules,
            start: start_idx,
            index,
        })
    }

    pub fn terminals(&self) -> &[RankedSymbol] {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &[NonTerminal] {
        &self.nonterminals
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &str {
        &self.nonterminals[self.start].name
    }

    pub fn start_index(&self) -> usize {
        self.start
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolKind> {
        self.index.get(name).copied()
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        match self.lookup(name)? {
            SymbolKind::NonTerminal(i) => Some(&self.rules[i]),
            SymbolKind::Terminal(_) => None,
        }
    }

    /// Maximum order of a non-terminal type.
    pub fn order(&self) -> u32 {
        self.nonterminals.iter().map(|n| n.ty.order()).max().unwrap_or(0)
    }

    pub fn all_homogeneous(&self) -> bool {
        self.nonterminals.iter().all(|n| n.ty.is_homogeneous())
    }

    /// `Λ(F)`: the rule for `F` curried into a lambda term.
    pub fn lambda_of(&self, name: &str) -> Result<LambdaTerm> {
        let rule = self
            .rule(name)
            .ok_or_else(|| Error::UnknownNonTerminal(name.to_string()))?;
        Ok(LambdaTerm {
            params: rule.params.clone(),
            body: rule.body.clone(),
        })
    }

    /// Non-terminals unreachable from the start symbol in the static
    /// dependency graph. This over-approximates reachability by derivation.
    pub fn dead_rules(&self) -> BTreeSet<String> {
        let mut seen = vec![false; self.rules.len()];
        let mut work = vec![self.start];
        seen[self.start] = true;
        while let Some(i) = work.pop() {
            self.rules[i].body.for_each_symbol(&mut |s| {
                if let Some(SymbolKind::NonTerminal(j)) = self.index.get(s) {
                    if !seen[*j] {
                        seen[*j] = true;
                        work.push(*j);
                    }
                }
            });
        }
        self.nonterminals
            .iter()
            .zip(seen)
            .filter(|(_, s)| !s)
            .map(|(n, _)| n.name.clone())
            .collect()
    }
}

/// Serializes in the scheme file grammar accepted by [`parse_scheme`].
impl fmt::Display for RecursionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terminals {
            writeln!(f, "%terminal {}:{}", t.name, t.rank)?;
        }
        for n in &self.nonterminals {
            writeln!(f, "%nonterminal {} : {}", n.name, n.ty)?;
        }
        writeln!(f, "%start {}", self.start())?;
        for r in &self.rules {
            write!(f, "{}", r.head)?;
            for (p, _) in &r.params {
                write!(f, " {}", p)?;
            }
            writeln!(f, " = {} .", r.body)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::PHI_TWICE;

    #[test]
    fn phi_twice_parses_with_order_2() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.start(), "S");
        assert_eq!(g.rules().len(), 3);
    }

    #[test]
    fn trivial_scheme() {
        let g = parse_scheme("%terminal a:0\n%nonterminal S : o\n%start S\nS = a.").unwrap();
        assert_eq!(g.order(), 0);
        assert_eq!(g.lambda_of("S").unwrap().to_string(), "λ. a");
    }

    #[test]
    fn duplicate_rule_rejected() {
        let src = "%terminal a:0\n%nonterminal S : o\n%start S\nS = a .\nS = a .";
        assert!(matches!(parse_scheme(src), Err(Error::Validation(_))));
    }

    #[test]
    fn validation_errors() {
        let missing = "%terminal a:0\n%nonterminal S : o\n%nonterminal F : o\n%start S\nS = a .";
        assert!(matches!(parse_scheme(missing), Err(Error::Validation(_))));
        let not_ground = "%terminal a:0\n%nonterminal S : o -> o\n%start S\nS x = a .";
        assert!(matches!(parse_scheme(not_ground), Err(Error::Validation(_))));
        let ill_typed = "%terminal a:0\n%terminal f:1\n%nonterminal S : o\n%start S\nS = f .";
        assert!(matches!(parse_scheme(ill_typed), Err(Error::Validation(_))));
        let arity = "%terminal a:0\n%nonterminal S : o\n%nonterminal F : o -> o\n%start S\nS = F a .\nF = a .";
        assert!(matches!(parse_scheme(arity), Err(Error::Validation(_))));
    }

    #[test]
    fn lambda_terms() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        assert_eq!(g.lambda_of("H").unwrap().to_string(), "λz. F (g z)");
        assert_eq!(g.lambda_of("F").unwrap().to_string(), "λphi. phi (phi (F h))");
        assert_eq!(g.lambda_of("S").unwrap().to_string(), "λ. H a");
        assert!(matches!(g.lambda_of("Q"), Err(Error::UnknownNonTerminal(_))));
    }

    #[test]
    fn dead_rules() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        assert!(g.dead_rules().is_empty());
        let extra = format!("{}\n%nonterminal K : o -> o\nK x = x .", PHI_TWICE);
        let g = parse_scheme(&extra).unwrap();
        assert_eq!(g.dead_rules().into_iter().collect::<Vec<_>>(), vec!["K".to_string()]);
        let only_s = parse_scheme("%terminal a:0\n%nonterminal S : o\n%start S\nS = a .").unwrap();
        assert!(only_s.dead_rules().is_empty());
    }

    #[test]
    fn display_reparses() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        let again = parse_scheme(&g.to_string()).unwrap();
        assert_eq!(again.to_string(), g.to_string());
    }
}
