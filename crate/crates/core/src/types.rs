//! Simple types over the single atom `o`, ranked symbols and applicative terms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq, Hash)]
enum TypeNode {
    Base,
    Arrow(SimpleType, SimpleType),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct TypeData {
    node: TypeNode,
    order: u32,
    arity: usize,
    homogeneous: bool,
}

/// A simple type `A1 -> ... -> An -> o`.
///
/// Values are reference counted and carry their order, arity and homogeneity,
/// so these queries are O(1). Equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimpleType(Arc<TypeData>);

impl SimpleType {
    pub fn base() -> Self {
        SimpleType(Arc::new(TypeData {
            node: TypeNode::Base,
            order: 0,
            arity: 0,
            homogeneous: true,
        }))
    }

    pub fn arrow(arg: SimpleType, result: SimpleType) -> Self {
        let order = (arg.order() + 1).max(result.order());
        let arity = result.arity() + 1;
        // Homogeneity of A -> B: A homogeneous, B homogeneous, ord A >= first argument of B.
        let homogeneous = arg.is_homogeneous()
            && result.is_homogeneous()
            && result.args().next().is_none_or(|b1| arg.order() >= b1.order());
        SimpleType(Arc::new(TypeData {
            node: TypeNode::Arrow(arg, result),
            order,
            arity,
            homogeneous,
        }))
    }

    /// `A1 -> ... -> An -> o` from the argument list.
    pub fn from_args<I>(args: I) -> Self
    where
        I: IntoIterator<Item = SimpleType>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(SimpleType::base(), |acc, a| SimpleType::arrow(a, acc))
    }

    /// Type of a terminal of the given rank: `o -> ... -> o -> o`.
    pub fn ranked(rank: usize) -> Self {
        SimpleType::from_args(std::iter::repeat_n(SimpleType::base(), rank).collect::<Vec<_>>())
    }

    pub fn is_base(&self) -> bool {
        matches!(self.0.node, TypeNode::Base)
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn is_homogeneous(&self) -> bool {
        self.0.homogeneous
    }

    /// `(argument, result)` of an arrow type.
    pub fn split(&self) -> Option<(&SimpleType, &SimpleType)> {
        match &self.0.node {
            TypeNode::Base => None,
            TypeNode::Arrow(a, b) => Some((a, b)),
        }
    }

    /// Canonical argument types `A1, ..., An`.
    pub fn args(&self) -> Args<'_> {
        Args { cur: self }
    }

    /// The type left after applying `k` arguments.
    pub fn drop_args(&self, k: usize) -> Option<&SimpleType> {
        let mut t = self;
        for _ in 0..k {
            t = t.split()?.1;
        }
        Some(t)
    }
}

pub struct Args<'a> {
    cur: &'a SimpleType,
}

impl<'a> Iterator for Args<'a> {
    type Item = &'a SimpleType;

    fn next(&mut self) -> Option<Self::Item> {
        let (a, b) = self.cur.split()?;
        self.cur = b;
        Some(a)
    }
}

/// Order of a simple type: `ord(o) = 0`, `ord(A -> B) = max(ord A + 1, ord B)`.
pub fn type_order(t: &SimpleType) -> u32 {
    t.order()
}

/// Argument orders are non-increasing and every argument is itself homogeneous.
pub fn is_homogeneous(t: &SimpleType) -> bool {
    t.is_homogeneous()
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.split() {
            None => write!(f, "o"),
            Some((a, b)) => {
                if a.is_base() {
                    write!(f, "o -> {}", b)
                } else {
                    write!(f, "({}) -> {}", a, b)
                }
            }
        }
    }
}

impl fmt::Debug for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses `o`, right-associative `->` and parentheses. The tuple form
/// `(A1, ..., An, o)` is read as `A1 -> ... -> An -> o`.
pub fn parse_type(text: &str) -> Result<SimpleType> {
    let toks = tokenize_type(text)?;
    let mut p = TypeParser { toks: &toks, pos: 0 };
    let t = p.arrow()?;
    if p.pos != toks.len() {
        return Err(Error::TypeSyntax(format!("trailing input in type `{}`", text)));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq)]
enum TypeTok {
    Base,
    Arrow,
    LParen,
    RParen,
    Comma,
}

fn tokenize_type(text: &str) -> Result<Vec<TypeTok>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            'o' | '0' => out.push(TypeTok::Base),
            '(' => out.push(TypeTok::LParen),
            ')' => out.push(TypeTok::RParen),
            ',' => out.push(TypeTok::Comma),
            '→' => out.push(TypeTok::Arrow),
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                out.push(TypeTok::Arrow);
            }
            other => {
                return Err(Error::TypeSyntax(format!(
                    "unexpected character `{}` in type `{}`",
                    other, text
                )))
            }
        }
    }
    Ok(out)
}

struct TypeParser<'a> {
    toks: &'a [TypeTok],
    pos: usize,
}

impl TypeParser<'_> {
    fn peek(&self) -> Option<&TypeTok> {
        self.toks.get(self.pos)
    }

    fn arrow(&mut self) -> Result<SimpleType> {
        let lhs = self.atom()?;
        if self.peek() == Some(&TypeTok::Arrow) {
            self.pos += 1;
            let rhs = self.arrow()?;
            Ok(SimpleType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn atom(&mut self) -> Result<SimpleType> {
        match self.peek() {
            Some(TypeTok::Base) => {
                self.pos += 1;
                Ok(SimpleType::base())
            }
            Some(TypeTok::LParen) => {
                self.pos += 1;
                let mut items = vec![self.arrow()?];
                while self.peek() == Some(&TypeTok::Comma) {
                    self.pos += 1;
                    items.push(self.arrow()?);
                }
                if self.peek() != Some(&TypeTok::RParen) {
                    return Err(Error::TypeSyntax("expected `)`".into()));
                }
                self.pos += 1;
                if items.len() == 1 {
                    return Ok(items.pop().unwrap());
                }
                let result = items.pop().unwrap();
                if !result.is_base() {
                    return Err(Error::TypeSyntax(
                        "tuple type notation must end with `o`".into(),
                    ));
                }
                Ok(SimpleType::from_args(items))
            }
            other => Err(Error::TypeSyntax(format!("unexpected token {:?}", other))),
        }
    }
}

/// A terminal symbol with its rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankedSymbol {
    pub name: String,
    pub rank: usize,
}

impl RankedSymbol {
    pub fn new(name: impl Into<String>, rank: usize) -> Self {
        RankedSymbol { name: name.into(), rank }
    }

    pub fn ty(&self) -> SimpleType {
        SimpleType::ranked(self.rank)
    }
}

/// Applicative term over named symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AppTerm {
    Sym(String),
    App(Box<AppTerm>, Box<AppTerm>),
}

impl AppTerm {
    pub fn sym(name: impl Into<String>) -> Self {
        AppTerm::Sym(name.into())
    }

    pub fn app(f: AppTerm, x: AppTerm) -> Self {
        AppTerm::App(Box::new(f), Box::new(x))
    }

    /// `head a1 ... an`.
    pub fn apply(head: AppTerm, args: impl IntoIterator<Item = AppTerm>) -> Self {
        args.into_iter().fold(head, AppTerm::app)
    }

    /// Head symbol and arguments of the application spine.
    pub fn spine(&self) -> (&str, Vec<&AppTerm>) {
        let mut args = Vec::new();
        let mut t = self;
        loop {
            match t {
                AppTerm::Sym(s) => {
                    args.reverse();
                    return (s, args);
                }
                AppTerm::App(f, x) => {
                    args.push(&**x);
                    t = f;
                }
            }
        }
    }

    /// Calls `f` on every symbol occurrence.
    pub fn for_each_symbol<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            AppTerm::Sym(s) => f(s),
            AppTerm::App(a, b) => {
                a.for_each_symbol(f);
                b.for_each_symbol(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            AppTerm::Sym(_) => 1,
            AppTerm::App(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for AppTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppTerm::Sym(s) => write!(f, "{}", s),
            AppTerm::App(a, b) => {
                write!(f, "{} ", a)?;
                match **b {
                    AppTerm::Sym(_) => write!(f, "{}", b),
                    AppTerm::App(..) => write!(f, "({})", b),
                }
            }
        }
    }
}

/// Typing environment: symbol name to type.
pub type TypeEnv = HashMap<String, SimpleType>;

/// Types `term` under `env`, rejecting unknown symbols and ill-typed applications.
pub fn check_term(term: &AppTerm, env: &TypeEnv) -> Result<SimpleType> {
    match term {
        AppTerm::Sym(s) => env
            .get(s)
            .cloned()
            .ok_or_else(|| Error::UnknownSymbol(s.clone())),
        AppTerm::App(m, n) => {
            let fun = check_term(m, env)?;
            let arg = check_term(n, env)?;
            match fun.split() {
                Some((expected, result)) if *expected == arg => Ok(result.clone()),
                Some((expected, _)) => Err(Error::TypeMismatch {
                    term: term.to_string(),
                    expected: expected.to_string(),
                    found: arg.to_string(),
                }),
                None => Err(Error::TypeMismatch {
                    term: term.to_string(),
                    expected: format!("an arrow type for `{}`", m),
                    found: fun.to_string(),
                }),
            }
        }
    }
}
