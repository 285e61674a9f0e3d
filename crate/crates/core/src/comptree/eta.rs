//! η-long normal forms of applicative rule bodies.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::scheme::LambdaTerm;
use crate::types::{check_term, AppTerm, SimpleType, TypeEnv};

/// `λx1 ... xn. h s1 ... sm` with every `si` again η-long. Heads are always
/// symbols here because rule bodies contain no abstractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaTerm {
    pub binders: Vec<(String, SimpleType)>,
    pub head: String,
    pub args: Vec<EtaTerm>,
}

impl EtaTerm {
    /// Order of the lambda node: `1 + max ord(xi)`, or 0 for a dummy lambda.
    pub fn lambda_order(&self) -> u32 {
        self.binders.iter().map(|(_, t)| t.order() + 1).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.args.iter().map(EtaTerm::size).sum::<usize>()
    }
}

impl fmt::Display for EtaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.binders.iter().map(|(n, _)| n.as_str()).collect();
        write!(f, "λ{}. {}", names.join(" "), self.head)?;
        for a in &self.args {
            write!(f, " ({})", a)?;
        }
        Ok(())
    }
}

/// Fresh names for η-expansion variables that avoid every name in `taken`.
pub(crate) struct Fresh {
    taken: HashSet<String>,
    next: usize,
}

impl Fresh {
    pub(crate) fn new(taken: impl IntoIterator<Item = String>) -> Self {
        Fresh {
            taken: taken.into_iter().collect(),
            next: 0,
        }
    }

    fn name(&mut self) -> String {
        loop {
            let candidate = if self.next == 0 {
                "x".to_string()
            } else {
                format!("x{}", self.next)
            };
            self.next += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// η-expands an applicative term of type `ty`.
pub fn eta_long(term: &AppTerm, ty: &SimpleType, env: &TypeEnv) -> Result<EtaTerm> {
    let mut fresh = Fresh::new(env.keys().cloned());
    eta_expand(term, ty, env, &mut fresh)
}

/// η-long form of a curried rule `λz̄. body`.
pub fn eta_long_lambda(lam: &LambdaTerm, env: &TypeEnv) -> Result<EtaTerm> {
    let mut env = env.clone();
    for (p, t) in &lam.params {
        env.insert(p.clone(), t.clone());
    }
    let mut fresh = Fresh::new(env.keys().cloned());
    let mut body = eta_expand(&lam.body, &SimpleType::base(), &env, &mut fresh)?;
    let mut binders = lam.params.clone();
    binders.append(&mut body.binders);
    body.binders = binders;
    Ok(body)
}

pub(crate) fn eta_expand(
    term: &AppTerm,
    ty: &SimpleType,
    env: &TypeEnv,
    fresh: &mut Fresh,
) -> Result<EtaTerm> {
    let actual = check_term(term, env)?;
    if actual != *ty {
        return Err(Error::TypeMismatch {
            term: term.to_string(),
            expected: ty.to_string(),
            found: actual.to_string(),
        });
    }
    let binders: Vec<(String, SimpleType)> =
        ty.args().map(|a| (fresh.name(), a.clone())).collect();
    let mut inner = env.clone();
    for (n, t) in &binders {
        inner.insert(n.clone(), t.clone());
    }
    let (head, args) = term.spine();
    let mut out = Vec::with_capacity(args.len() + binders.len());
    for a in args {
        let aty = check_term(a, &inner)?;
        out.push(eta_expand(a, &aty, &inner, fresh)?);
    }
    for (n, t) in &binders {
        out.push(eta_expand(&AppTerm::Sym(n.clone()), t, &inner, fresh)?);
    }
    Ok(EtaTerm {
        binders,
        head: head.to_string(),
        args: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::parse_scheme;
    use crate::testkit::{scheme_env, PHI_TWICE};
    use crate::types::parse_type;

    #[test]
    fn terminal_expansion() {
        let env: TypeEnv = [("g".to_string(), parse_type("o -> o -> o").unwrap())].into();
        let e = eta_long(&AppTerm::sym("g"), &parse_type("o -> o -> o").unwrap(), &env).unwrap();
        assert_eq!(e.to_string(), "λx x1. g (λ. x) (λ. x1)");
        assert_eq!(e.lambda_order(), 1);
    }

    #[test]
    fn ground_constant_gets_dummy_lambda() {
        let env: TypeEnv = [("a".to_string(), SimpleType::base())].into();
        let e = eta_long(&AppTerm::sym("a"), &SimpleType::base(), &env).unwrap();
        assert_eq!(e.to_string(), "λ. a");
        assert_eq!(e.lambda_order(), 0);
    }

    #[test]
    fn phi_twice_rule_f() {
        let g = parse_scheme(PHI_TWICE).unwrap();
        let lam = g.lambda_of("F").unwrap();
        let e = eta_long_lambda(&lam, &scheme_env(&g)).unwrap();
        assert_eq!(e.to_string(), "λphi. phi (λ. phi (λ. F (λx. h (λ. x))))");
        assert_eq!(e.lambda_order(), 2);
    }

    #[test]
    fn type_mismatch() {
        let env: TypeEnv = [("a".to_string(), SimpleType::base())].into();
        assert!(matches!(
            eta_long(&AppTerm::sym("a"), &parse_type("o -> o").unwrap(), &env),
            Err(Error::TypeMismatch { .. })
        ));
    }
}
