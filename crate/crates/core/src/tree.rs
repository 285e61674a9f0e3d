//! Finite prefixes of value trees, with `CUT` (depth limit) and
//! `DIVERGENT` (step budget exhausted) leaves.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum ValueTree {
    Node { label: String, children: Vec<ValueTree> },
    Cut,
    Divergent,
}

impl ValueTree {
    pub fn node(label: impl Into<String>, children: Vec<ValueTree>) -> Self {
        ValueTree::Node {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(label: impl Into<String>) -> Self {
        ValueTree::node(label, Vec::new())
    }

    pub fn is_marker(&self) -> bool {
        !matches!(self, ValueTree::Node { .. })
    }

    /// Number of terminal-labelled nodes.
    pub fn size(&self) -> usize {
        match self {
            ValueTree::Node { children, .. } => 1 + children.iter().map(|c| c.size()).sum::<usize>(),
            _ => 0,
        }
    }

    pub fn contains_divergent(&self) -> bool {
        match self {
            ValueTree::Node { children, .. } => children.iter().any(|c| c.contains_divergent()),
            ValueTree::Divergent => true,
            ValueTree::Cut => false,
        }
    }

    /// `self` approximates `other`: markers in `self` match anything,
    /// nodes must match label and children.
    pub fn approximates(&self, other: &ValueTree) -> bool {
        match (self, other) {
            (ValueTree::Cut | ValueTree::Divergent, _) => true,
            (
                ValueTree::Node { label: a, children: ca },
                ValueTree::Node { label: b, children: cb },
            ) => a == b && ca.len() == cb.len() && ca.iter().zip(cb).all(|(x, y)| x.approximates(y)),
            _ => false,
        }
    }

    /// Parses the S-expression rendering produced by `Display`.
    pub fn parse(text: &str) -> Result<ValueTree> {
        let toks: Vec<String> = text
            .replace('(', " ( ")
            .replace(')', " ) ")
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let mut pos = 0;
        let t = parse_sexp(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Validation("trailing input after tree".into()));
        }
        Ok(t)
    }
}

fn parse_sexp(toks: &[String], pos: &mut usize) -> Result<ValueTree> {
    let bad = || Error::Validation("malformed tree S-expression".into());
    if toks.get(*pos).map(String::as_str) != Some("(") {
        return Err(bad());
    }
    *pos += 1;
    let label = toks.get(*pos).ok_or_else(bad)?.clone();
    if label == "(" || label == ")" {
        return Err(bad());
    }
    *pos += 1;
    let mut children = Vec::new();
    while toks.get(*pos).map(String::as_str) == Some("(") {
        children.push(parse_sexp(toks, pos)?);
    }
    if toks.get(*pos).map(String::as_str) != Some(")") {
        return Err(bad());
    }
    *pos += 1;
    Ok(match (label.as_str(), children.is_empty()) {
        ("CUT", true) => ValueTree::Cut,
        ("DIVERGENT", true) => ValueTree::Divergent,
        _ => ValueTree::Node { label, children },
    })
}

impl fmt::Display for ValueTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueTree::Cut => write!(f, "(CUT)"),
            ValueTree::Divergent => write!(f, "(DIVERGENT)"),
            ValueTree::Node { label, children } => {
                write!(f, "({}", label)?;
                for c in children {
                    write!(f, " {}", c)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Trees agree exactly, except at positions where every tree carries a marker.
pub fn agree_modulo_markers(trees: &[&ValueTree]) -> bool {
    if trees.is_empty() || trees.iter().all(|t| t.is_marker()) {
        return true;
    }
    let (label, arity) = match trees[0] {
        ValueTree::Node { label, children } => (label, children.len()),
        _ => return false,
    };
    let mut kids: Vec<&[ValueTree]> = Vec::with_capacity(trees.len());
    for t in trees {
        match t {
            ValueTree::Node { label: l, children } if l == label && children.len() == arity => {
                kids.push(children)
            }
            _ => return false,
        }
    }
    (0..arity).all(|i| {
        let col: Vec<&ValueTree> = kids.iter().map(|k| &k[i]).collect();
        agree_modulo_markers(&col)
    })
}
