//! Scheme file grammar:
//!
//! ```text
//! # comment
//! %terminal g:2 h:1 a:0
//! %nonterminal F : (o -> o) -> o
//! %start S
//! F phi = phi (phi (F h)) .
//! ```

use crate::error::{Error, Result};
use crate::types::{parse_type, AppTerm, RankedSymbol};

use super::{NonTerminal, RawRule, RecursionScheme};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Eq,
    Dot,
    LParen,
    RParen,
    Newline,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Parses and validates a scheme file.
pub fn parse_scheme(text: &str) -> Result<RecursionScheme> {
    let mut terminals = Vec::new();
    let mut nonterminals = Vec::new();
    let mut start: Option<String> = None;
    let mut rule_toks = Vec::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        let trimmed = content.trim_start();
        if let Some(directive) = trimmed.strip_prefix('%') {
            let col = content.len() - trimmed.len() + 1;
            let (word, rest) = directive
                .split_once(char::is_whitespace)
                .unwrap_or((directive, ""));
            match word {
                "terminal" => {
                    for item in rest.split_whitespace() {
                        let (name, rank) = item.split_once(':').ok_or_else(|| {
                            syntax(line, col, format!("expected name:rank, found `{}`", item))
                        })?;
                        check_ident(name, line, col)?;
                        let rank: usize = rank.parse().map_err(|_| {
                            syntax(line, col, format!("bad rank `{}`", rank))
                        })?;
                        terminals.push(RankedSymbol::new(name, rank));
                    }
                }
                "nonterminal" => {
                    let (name, ty) = rest.split_once(':').ok_or_else(|| {
                        syntax(line, col, "expected `%nonterminal Name : TYPE`")
                    })?;
                    let name = name.trim();
                    check_ident(name, line, col)?;
                    let ty = parse_type(ty).map_err(|e| syntax(line, col, e.to_string()))?;
                    nonterminals.push(NonTerminal {
                        name: name.to_string(),
                        ty,
                    });
                }
                "start" => {
                    let name = rest.trim();
                    check_ident(name, line, col)?;
                    if start.replace(name.to_string()).is_some() {
                        return Err(syntax(line, col, "duplicate %start"));
                    }
                }
                other => return Err(syntax(line, col, format!("unknown directive `%{}`", other))),
            }
            continue;
        }
        tokenize_line(content, line, &mut rule_toks)?;
        rule_toks.push(Spanned {
            tok: Tok::Newline,
            line,
            col: content.len() + 1,
        });
    }

    let rules = parse_rules(&rule_toks)?;
    let start = start.ok_or_else(|| Error::Validation("missing %start".into()))?;
    RecursionScheme::new(terminals, nonterminals, rules, &start)
}

fn check_ident(name: &str, line: usize, col: usize) -> Result<()> {
    if name.is_empty() || !name.chars().all(is_ident_char) {
        return Err(syntax(line, col, format!("bad identifier `{}`", name)));
    }
    Ok(())
}

fn tokenize_line(content: &str, line: usize, out: &mut Vec<Spanned>) -> Result<()> {
    let chars: Vec<char> = content.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '=' => Tok::Eq,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if is_ident_char(c) => {
                let begin = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[begin..i].iter().collect()),
                    line,
                    col,
                });
                continue;
            }
            other => return Err(syntax(line, col, format!("unexpected character `{}`", other))),
        };
        out.push(Spanned { tok, line, col });
        i += 1;
    }
    Ok(())
}

struct RuleParser<'a> {
    toks: Vec<&'a Spanned>,
    pos: usize,
}

fn parse_rules(toks: &[Spanned]) -> Result<Vec<RawRule>> {
    let toks: Vec<&Spanned> = toks.iter().filter(|t| t.tok != Tok::Newline).collect();
    let mut p = RuleParser { toks, pos: 0 };
    let mut rules = Vec::new();
    while p.pos < p.toks.len() {
        rules.push(p.rule()?);
    }
    Ok(rules)
}

impl<'a> RuleParser<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos).copied()
    }

    fn err_here(&self, msg: &str) -> Error {
        match self.peek().or_else(|| self.toks.last().copied()) {
            Some(t) => syntax(t.line, t.col, msg),
            None => syntax(1, 1, msg),
        }
    }

    fn rule(&mut self) -> Result<RawRule> {
        let (head, line) = match self.peek() {
            Some(Spanned {
                tok: Tok::Ident(name),
                line,
                ..
            }) => (name.clone(), *line),
            _ => return Err(self.err_here("expected rule head")),
        };
        self.pos += 1;
        let mut params = Vec::new();
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Ident(p)) => {
                    params.push(p.clone());
                    self.pos += 1;
                }
                Some(Tok::Eq) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err_here("expected parameter or `=`")),
            }
        }
        let body = self.application()?;
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Dot) => self.pos += 1,
            _ => return Err(self.err_here("expected `.` at end of rule")),
        }
        Ok(RawRule {
            head,
            params,
            body,
            line,
        })
    }

    fn application(&mut self) -> Result<AppTerm> {
        let mut term = self.atom()?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Ident(_)) | Some(Tok::LParen)) {
            let arg = self.atom()?;
            term = AppTerm::app(term, arg);
        }
        Ok(term)
    }

    fn atom(&mut self) -> Result<AppTerm> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(AppTerm::Sym(name.clone()))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.application()?;
                match self.peek().map(|t| &t.tok) {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(t)
                    }
                    _ => Err(self.err_here("expected `)`")),
                }
            }
            _ => Err(self.err_here("expected a term")),
        }
    }
}
