//! Slow reference versions of the order-decomposition and stack safety,
//! written directly from their recursive definitions.

use hpl_core::hostack::{HoStack, StackSymbol, SymbolInfo};

/// `(position, symbol)` pairs, outermost first: the last lambda of order
/// above `l`, preceded by the decomposition of what lies strictly below it
/// at that lambda's order.
pub fn orddec(s: &HoStack, l: u32, info: &dyn SymbolInfo) -> Vec<(usize, StackSymbol)> {
    fn go(syms: &[StackSymbol], l: u32, info: &dyn SymbolInfo, out: &mut Vec<(usize, StackSymbol)>) {
        let last = (0..syms.len())
            .rev()
            .find(|&i| info.is_lambda(syms[i].sym) && info.order(syms[i].sym) > l);
        if let Some(i) = last {
            go(&syms[..i], info.order(syms[i].sym), info, out);
            out.push((i, syms[i]));
        }
    }
    let mut out = Vec::new();
    go(&s.top_symbols(), l, info, &mut out);
    out
}

pub fn is_l_safe(s: &HoStack, l: u32, info: &dyn SymbolInfo) -> bool {
    let d = orddec(s, l, info);
    if d.iter().any(|(_, x)| x.link.is_some_and(|k| k.height != 1)) {
        return false;
    }
    for (idx, (pos, x)) in d.iter().enumerate() {
        let Some(link) = x.link else { continue };
        if link.order > s.order() {
            continue;
        }
        let threshold = match d.get(idx + 1) {
            Some((_, above)) => info.order(above.sym),
            None => l,
        };
        match s.prefix_top(*pos).and_then(|p| p.collapse()) {
            Ok(t) if is_l_safe(&t, threshold, info) => {}
            _ => return false,
        }
    }
    true
}
