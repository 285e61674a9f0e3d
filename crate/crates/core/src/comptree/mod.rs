//! Computation graphs: the η-long rule trees of a scheme, with every
//! non-terminal occurrence turned into an `@` node whose operator child is
//! the shared root lambda of that non-terminal's rule.

mod binding;
mod dot;
mod eta;

use std::fmt;

use serde::Serialize;

use crate::scheme::{RecursionScheme, SymbolKind};
use crate::types::{SimpleType, TypeEnv};

pub use binding::{
    check_incremental_binding_static, check_incremental_binding_unfold, IbViolation,
    DEFAULT_UNFOLD_NODE_BOUND,
};
pub use dot::to_dot;
pub use eta::{eta_long, eta_long_lambda, EtaTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NodeKind {
    App,
    Lambda,
    Var,
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VarBinding {
    pub binder: NodeId,
    /// 1-based position of the variable among the binder's bound variables.
    pub param_index: usize,
    /// Edges from the variable up to its binder.
    pub span: usize,
}

#[derive(Debug, Clone)]
pub struct CompNode {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Variable or terminal name; for `@` nodes the applied non-terminal.
    pub label: String,
    /// Bound variables of a lambda node (empty for a dummy lambda).
    pub bound: Vec<(String, SimpleType)>,
    /// `@`: child 0 is the operator lambda. Other kinds: `children[i-1]` is `E_i`.
    pub children: Vec<NodeId>,
    /// Tree parent inside the rule tree; `None` for rule roots.
    pub parent: Option<NodeId>,
    pub var: Option<VarBinding>,
    pub order: u32,
    /// Child 0 of some `@` node.
    pub prime: bool,
    /// Index of the rule whose tree contains this node.
    pub rule: usize,
}

impl CompNode {
    /// `E_i(u)`: children of `@` are indexed from 0, all others from 1.
    pub fn child(&self, i: usize) -> Option<NodeId> {
        match self.kind {
            NodeKind::App => self.children.get(i).copied(),
            _ => i.checked_sub(1).and_then(|j| self.children.get(j).copied()),
        }
    }

    pub fn is_lambda(&self) -> bool {
        self.kind == NodeKind::Lambda
    }
}

impl fmt::Display for CompNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NodeKind::App => write!(f, "@{}", self.label),
            NodeKind::Lambda => {
                let names: Vec<&str> = self.bound.iter().map(|(n, _)| n.as_str()).collect();
                write!(f, "λ{}", names.join(" "))
            }
            NodeKind::Var | NodeKind::Terminal => write!(f, "{}", self.label),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompGraph {
    nodes: Vec<CompNode>,
    rule_roots: Vec<NodeId>,
    rule_names: Vec<String>,
    root: NodeId,
    order: u32,
}

impl CompGraph {
    pub fn nodes(&self) -> &[CompNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &CompNode {
        &self.nodes[id.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Root lambda of the start symbol's rule.
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn rule_root(&self, rule: usize) -> NodeId {
        self.rule_roots[rule]
    }

    pub fn rule_roots(&self) -> &[NodeId] {
        &self.rule_roots
    }

    pub fn rule_name(&self, rule: usize) -> &str {
        &self.rule_names[rule]
    }

    /// Order of the source scheme.
    pub fn scheme_order(&self) -> u32 {
        self.order
    }

    /// Short printable name of a node, unique across the graph.
    pub fn describe(&self, id: NodeId) -> String {
        format!("{}:{}", id, self.node(id))
    }

    /// Renders the rule tree below `id` as text (back-edges shown as `-> F`).
    pub fn render_tree(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.render_into(id, 0, &mut out);
        out
    }

    fn render_into(&self, id: NodeId, indent: usize, out: &mut String) {
        let n = self.node(id);
        out.push_str(&"  ".repeat(indent));
        out.push_str(&format!("{} {}", id, n));
        if let Some(v) = n.var {
            out.push_str(&format!(
                "  [binder {} #{} span {}]",
                v.binder, v.param_index, v.span
            ));
        }
        out.push_str(&format!("  ord {}", n.order));
        if n.prime {
            out.push_str(" prime");
        }
        out.push('\n');
        for (k, &c) in n.children.iter().enumerate() {
            if n.kind == NodeKind::App && k == 0 {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&format!("-> {} ({})\n", self.rule_name(self.node(c).rule), c));
            } else {
                self.render_into(c, indent + 1, out);
            }
        }
    }
}

/// Builds the computation graph of a validated scheme.
pub fn build_comp_graph(g: &RecursionScheme) -> CompGraph {
    let env = scheme_type_env(g);
    let mut b = Builder {
        g,
        nodes: Vec::new(),
        rule_roots: Vec::new(),
    };
    // Rule roots are allocated first so that back-edges can target them.
    for (i, _) in g.rules().iter().enumerate() {
        let id = b.alloc(NodeKind::Lambda, String::new(), None, i);
        b.rule_roots.push(id);
    }
    for (i, rule) in g.rules().iter().enumerate() {
        let lam = g.lambda_of(&rule.head).expect("rule exists");
        let eta = eta_long_lambda(&lam, &env).expect("validated scheme is well typed");
        let root = b.rule_roots[i];
        b.fill_lambda(root, &eta, i, &mut Vec::new());
    }
    let Builder {
        nodes, rule_roots, ..
    } = b;
    CompGraph {
        root: rule_roots[g.start_index()],
        rule_names: g.rules().iter().map(|r| r.head.clone()).collect(),
        nodes,
        rule_roots,
        order: g.order(),
    }
}

pub(crate) fn scheme_type_env(g: &RecursionScheme) -> TypeEnv {
    g.terminals()
        .iter()
        .map(|t| (t.name.clone(), t.ty()))
        .chain(g.nonterminals().iter().map(|n| (n.name.clone(), n.ty.clone())))
        .collect()
}

struct Builder<'a> {
    g: &'a RecursionScheme,
    nodes: Vec<CompNode>,
    rule_roots: Vec<NodeId>,
}

/// Lexical scope entry: variable name, binding lambda, 1-based index, type.
type Scope = Vec<(String, NodeId, usize, SimpleType)>;

impl Builder<'_> {
    fn alloc(&mut self, kind: NodeKind, label: String, parent: Option<NodeId>, rule: usize) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(CompNode {
            id,
            kind,
            label,
            bound: Vec::new(),
            children: Vec::new(),
            parent,
            var: None,
            order: 0,
            prime: false,
            rule,
        });
        id
    }

    fn fill_lambda(&mut self, lam: NodeId, eta: &EtaTerm, rule: usize, scope: &mut Scope) {
        {
            let node = &mut self.nodes[lam.index()];
            node.bound = eta.binders.clone();
            node.order = eta.lambda_order();
        }
        let mark = scope.len();
        for (k, (name, ty)) in eta.binders.iter().enumerate() {
            scope.push((name.clone(), lam, k + 1, ty.clone()));
        }

        let head = if let Some(pos) = scope.iter().rposition(|(n, ..)| *n == eta.head) {
            let (_, binder, param_index, ty) = scope[pos].clone();
            let id = self.alloc(NodeKind::Var, eta.head.clone(), Some(lam), rule);
            let span = self.distance_up(id, binder);
            let node = &mut self.nodes[id.index()];
            node.order = ty.order();
            node.var = Some(VarBinding {
                binder,
                param_index,
                span,
            });
            id
        } else {
            match self.g.lookup(&eta.head).expect("validated scheme") {
                SymbolKind::Terminal(t) => {
                    let id = self.alloc(NodeKind::Terminal, eta.head.clone(), Some(lam), rule);
                    self.nodes[id.index()].order = self.g.terminals()[t].ty().order();
                    id
                }
                SymbolKind::NonTerminal(n) => {
                    let id = self.alloc(NodeKind::App, eta.head.clone(), Some(lam), rule);
                    let target = self.rule_roots[n];
                    self.nodes[target.index()].prime = true;
                    self.nodes[id.index()].children.push(target);
                    id
                }
            }
        };
        self.nodes[lam.index()].children = vec![head];

        for arg in &eta.args {
            let child = self.alloc(NodeKind::Lambda, String::new(), Some(head), rule);
            self.nodes[head.index()].children.push(child);
            self.fill_lambda(child, arg, rule, scope);
        }
        scope.truncate(mark);
    }

    fn distance_up(&self, from: NodeId, to: NodeId) -> usize {
        let mut d = 0;
        let mut cur = from;
        while cur != to {
            cur = self.nodes[cur.index()]
                .parent
                .expect("binder lies on the path to the rule root");
            d += 1;
        }
        d
    }
}
