use std::collections::HashMap;

use crate::error::{Error, Result};

use super::{HoStack, Link, StackSymbol, Sym, SymbolInfo};

/// Nested brackets; symbols print as `name^(j,k)`, or bare when unlinked.
pub fn render_stack(s: &HoStack, name: &dyn Fn(Sym) -> String) -> String {
    let mut out = String::new();
    render_into(s, name, &mut out);
    out
}

fn render_into(s: &HoStack, name: &dyn Fn(Sym) -> String, out: &mut String) {
    out.push('[');
    if s.order() == 1 {
        for (i, sym) in s.symbols().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&name(sym.sym));
            if let Some(l) = sym.link {
                out.push_str(&format!("^({},{})", l.order, l.height));
            }
        }
    } else {
        for e in s.elements() {
            render_into(&e, name, out);
        }
    }
    out.push(']');
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: 1,
            column: self.src[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c)))
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.err("expected a number"))
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '[' | ']' | '^') {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn stack(&mut self, resolve: &mut dyn FnMut(&str) -> Option<Sym>) -> Result<HoStack> {
        self.eat('[')?;
        self.skip_ws();
        if self.peek() == Some('[') {
            let mut elems = Vec::new();
            while self.peek() == Some('[') {
                elems.push(self.stack(resolve)?);
                self.skip_ws();
            }
            self.eat(']')?;
            return HoStack::from_stacks(elems).map_err(|_| self.err("mixed nesting depths"));
        }
        let mut syms = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(']') => {
                    self.pos += 1;
                    return Ok(HoStack::from_symbols(syms));
                }
                None => return Err(self.err("unterminated stack")),
                Some('[') => return Err(self.err("symbols and stacks mixed")),
                Some(_) => {
                    let start = self.pos;
                    let name = self.ident().to_string();
                    let sym = resolve(&name).ok_or_else(|| {
                        self.pos = start;
                        self.err(format!("unknown stack symbol `{}`", name))
                    })?;
                    let mut link = None;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        self.eat('(')?;
                        let order = self.number()?;
                        self.eat(',')?;
                        let height = self.number()?;
                        self.eat(')')?;
                        link = Some(Link::new(order, height));
                    }
                    syms.push(StackSymbol { sym, link });
                }
            }
        }
    }
}

/// Parses the bracket notation produced by [`render_stack`].
pub fn parse_stack(text: &str, resolve: &mut dyn FnMut(&str) -> Option<Sym>) -> Result<HoStack> {
    let mut lx = Lexer { src: text, pos: 0 };
    let s = lx.stack(resolve)?;
    lx.skip_ws();
    if lx.pos != text.len() {
        return Err(lx.err("trailing input"));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolClass {
    Lambda { order: u32, prime: bool },
    Var { order: u32 },
    App,
    Terminal,
}

/// Symbol table for stacks built from raw letters instead of graph nodes.
#[derive(Debug, Clone, Default)]
pub struct OrderTable {
    names: Vec<String>,
    classes: Vec<SymbolClass>,
    index: HashMap<String, Sym>,
    max_lambda: u32,
}

impl OrderTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entries `name:kind[:order][:prime]` separated by whitespace, with kind
    /// one of `lam`, `var`, `app`, `term`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = OrderTable::new();
        for (i, item) in text.split_whitespace().enumerate() {
            let bad = |m: &str| Error::Validation(format!("order table entry {} `{}`: {}", i + 1, item, m));
            let parts: Vec<&str> = item.split(':').collect();
            let order = || -> Result<u32> {
                parts
                    .get(2)
                    .ok_or_else(|| bad("missing order"))?
                    .parse()
                    .map_err(|_| bad("bad order"))
            };
            let class = match parts.get(1).copied() {
                Some("lam") => SymbolClass::Lambda {
                    order: order()?,
                    prime: match parts.get(3).copied() {
                        None => false,
                        Some("prime") => true,
                        Some(_) => return Err(bad("expected `prime`")),
                    },
                },
                Some("var") => SymbolClass::Var { order: order()? },
                Some("app") => SymbolClass::App,
                Some("term") => SymbolClass::Terminal,
                _ => return Err(bad("unknown kind")),
            };
            if t.lookup(parts[0]).is_some() {
                return Err(bad("duplicate name"));
            }
            t.add(parts[0], class);
        }
        Ok(t)
    }

    pub fn add(&mut self, name: &str, class: SymbolClass) -> Sym {
        let s = Sym(self.names.len() as u32);
        self.names.push(name.to_string());
        self.classes.push(class);
        if let SymbolClass::Lambda { order, .. } = class {
            self.max_lambda = self.max_lambda.max(order);
        }
        self.index.insert(name.to_string(), s);
        s
    }

    pub fn name_of(&self, s: Sym) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn class(&self, s: Sym) -> SymbolClass {
        self.classes[s.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> {
        (0..self.names.len() as u32).map(Sym)
    }

    pub fn parse_stack(&self, text: &str) -> Result<HoStack> {
        parse_stack(text, &mut |n| self.lookup(n))
    }

    pub fn render(&self, s: &HoStack) -> String {
        render_stack(s, &|x| self.names[x.0 as usize].clone())
    }
}

impl SymbolInfo for OrderTable {
    fn is_lambda(&self, s: Sym) -> bool {
        matches!(self.class(s), SymbolClass::Lambda { .. })
    }

    fn order(&self, s: Sym) -> u32 {
        match self.class(s) {
            SymbolClass::Lambda { order, .. } | SymbolClass::Var { order } => order,
            SymbolClass::App | SymbolClass::Terminal => 0,
        }
    }

    fn is_prime(&self, s: Sym) -> bool {
        matches!(self.class(s), SymbolClass::Lambda { prime: true, .. })
    }

    fn name(&self, s: Sym) -> String {
        self.names[s.0 as usize].clone()
    }

    fn max_lambda_order(&self) -> u32 {
        self.max_lambda
    }
}
