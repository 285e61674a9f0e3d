use super::{Configuration, Machine, StepOutcome, Transition};

#[derive(Debug, Clone, Default)]
pub struct TraceOptions {
    /// Stack renderings longer than this are cut, keeping the top end.
    pub truncate: Option<usize>,
    /// Child to follow at the `k`-th output; child 0 afterwards.
    pub path: Vec<usize>,
}

/// One line per `→` step along a single branch:
/// `state | top-node | action | stack`.
pub fn trace_run(m: &Machine, steps: usize, opts: &TraceOptions) -> Vec<String> {
    let mut lines = Vec::new();
    let mut c: Configuration = m.initial.clone();
    let mut outputs = 0;
    for _ in 0..steps {
        let top = c.stack.top1().ok().map(|s| s.sym);
        let top_label = top.map_or("bot".to_string(), |s| m.label(s).to_string());
        let action = match m.transition(c.state, top) {
            Some(Transition::Ops(ops, _)) => ops.iter().map(|o| o.to_string()).collect::<Vec<_>>().join("; "),
            Some(Transition::Output { terminal, .. }) => format!("output {}", m.terminals[*terminal].name),
            None => "stuck".to_string(),
        };
        lines.push(format!(
            "{} | {} | {} | {}",
            m.states[c.state],
            top_label,
            action,
            cut(m.render_stack(&c.stack), opts.truncate)
        ));
        c = match m.step(&c) {
            StepOutcome::Internal(n) => n,
            StepOutcome::Output { mut succs, .. } => {
                let dir = opts.path.get(outputs).copied().unwrap_or(0);
                outputs += 1;
                if dir >= succs.len() {
                    break;
                }
                succs.swap_remove(dir)
            }
            StepOutcome::Stuck(_) => break,
        };
    }
    lines
}

fn cut(s: String, limit: Option<usize>) -> String {
    match limit {
        Some(n) if s.chars().count() > n => {
            let skip = s.chars().count() - n;
            format!("...{}", s.chars().skip(skip).collect::<String>())
        }
        _ => s,
    }
}
