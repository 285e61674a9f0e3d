use std::fmt::Write;

use super::{CompGraph, NodeKind};

/// Graphviz rendering. Back-edges to rule roots are dashed; binder edges
/// are drawn dotted when `binders` is set.
pub fn to_dot(cg: &CompGraph, binders: bool) -> String {
    let mut out = String::from("digraph computation_graph {\n  node [fontname=\"monospace\"];\n");
    for n in cg.nodes() {
        let shape = match n.kind {
            NodeKind::App => "circle",
            NodeKind::Lambda => "ellipse",
            NodeKind::Var => "box",
            NodeKind::Terminal => "diamond",
        };
        let mut label = n.to_string().replace('"', "\\\"");
        if cg.rule_roots().contains(&n.id) {
            label = format!("{} [{}]", label, cg.rule_name(n.rule));
        }
        let _ = writeln!(out, "  {} [shape={}, label=\"{}\"];", n.id, shape, label);
    }
    for n in cg.nodes() {
        for (k, c) in n.children.iter().enumerate() {
            let back = n.kind == NodeKind::App && k == 0;
            let style = if back { " [style=dashed]" } else { "" };
            let _ = writeln!(out, "  {} -> {}{};", n.id, c, style);
        }
        if binders {
            if let Some(v) = n.var {
                let _ = writeln!(
                    out,
                    "  {} -> {} [style=dotted, constraint=false, label=\"{}\"];",
                    n.id, v.binder, v.param_index
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
