use std::collections::VecDeque;

use serde::Serialize;

use crate::comptree::{CompGraph, NodeKind};
use crate::hostack::{order_decomposition, DecEntry, Link, SafetyChecker, SafetyFailure, SafetyWitness, Sym};

use super::{convention_link, Configuration, Machine, StepOutcome, StuckReason};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    Unsafe(SafetyWitness),
    /// The innermost entry of `orddec_{ord x}` is not the binder occurrence.
    BinderNotLast {
        var: Sym,
        binder: Sym,
        found: Option<DecEntry>,
    },
    /// `pop_1^span` does not expose the binder.
    Span { var: Sym, binder: Sym, found: Option<Sym> },
    Link {
        symbol: Sym,
        found: Option<Link>,
        expected: Option<Link>,
    },
    Stuck(StuckReason),
}

impl ViolationKind {
    /// A decomposition entry with a link of height at least 2, or a binder
    /// missing from its expected place in the decomposition.
    pub fn is_decomposition_witness(&self) -> bool {
        match self {
            ViolationKind::Unsafe(w) => {
                w.path.is_empty() && matches!(w.failure, SafetyFailure::LinkHeight { height, .. } if height >= 2)
            }
            ViolationKind::BinderNotLast { .. } => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonitorViolation {
    /// Number of `→` steps taken before reaching the configuration.
    pub step: usize,
    pub stack: String,
    pub kind: ViolationKind,
}

impl MonitorViolation {
    pub fn describe(&self, m: &Machine) -> String {
        let name = |s: Sym| m.label(s).to_string();
        let what = match &self.kind {
            ViolationKind::Unsafe(w) => format!("unsafe: {}", w.describe(m.table())),
            ViolationKind::BinderNotLast { var, binder, found } => format!(
                "binder {} of {} is not the last decomposition entry (found {})",
                name(*binder),
                name(*var),
                found.map_or("nothing".into(), |e| name(e.symbol.sym))
            ),
            ViolationKind::Span { var, binder, found } => format!(
                "span of {} reaches {} instead of its binder {}",
                name(*var),
                found.map_or("the bottom".into(), name),
                name(*binder)
            ),
            ViolationKind::Link { symbol, found, expected } => {
                let link = |l: &Option<Link>| l.map_or("none".into(), |l| format!("({},{})", l.order, l.height));
                format!("{} carries link {}, expected {}", name(*symbol), link(found), link(expected))
            }
            ViolationKind::Stuck(r) => format!("stuck: {}", r),
        };
        format!("step {}: {}  in {}", self.step, what, self.stack)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MonitorReport {
    pub steps: usize,
    pub configurations: usize,
    pub violation_count: usize,
    /// The first violations found, in breadth-first order.
    pub violations: Vec<MonitorViolation>,
}

impl MonitorReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

const KEEP: usize = 64;

/// Explores the `→`-reachable configurations of the machine of `g`
/// breadth-first, across all output branches, for at most `steps` steps,
/// checking safety, binder placement, spans and links at each.
pub fn safety_monitor(m: &Machine, g: &CompGraph, steps: usize) -> MonitorReport {
    let mut report = MonitorReport::default();
    let mut checker = SafetyChecker::new(g);
    let mut queue = VecDeque::new();
    let record = |report: &mut MonitorReport, step: usize, c: &Configuration, kinds: Vec<ViolationKind>| {
        report.configurations += 1;
        for kind in kinds {
            report.violation_count += 1;
            if report.violations.len() < KEEP {
                report.violations.push(MonitorViolation {
                    step,
                    stack: m.render_stack(&c.stack),
                    kind,
                });
            }
        }
    };
    let c0 = m.initial.clone();
    let kinds = check_configuration(m, g, &mut checker, &c0, false);
    record(&mut report, 0, &c0, kinds);
    queue.push_back(c0);
    while report.steps < steps {
        let Some(c) = queue.pop_front() else { break };
        report.steps += 1;
        let next = match m.step(&c) {
            StepOutcome::Internal(n) => vec![n],
            StepOutcome::Output { succs, .. } => succs,
            StepOutcome::Stuck(r) => {
                let step = report.steps;
                record(&mut report, step, &c, vec![ViolationKind::Stuck(r)]);
                continue;
            }
        };
        for n in next {
            let kinds = check_configuration(m, g, &mut checker, &n, true);
            let step = report.steps;
            record(&mut report, step, &n, kinds);
            queue.push_back(n);
        }
    }
    report
}

fn check_configuration(
    m: &Machine,
    g: &CompGraph,
    checker: &mut SafetyChecker<'_>,
    c: &Configuration,
    just_pushed: bool,
) -> Vec<ViolationKind> {
    let mut out = Vec::new();
    if let Err(w) = checker.check(&c.stack, 0) {
        out.push(ViolationKind::Unsafe(w));
    }
    let Ok(top) = c.stack.top1() else { return out };
    if just_pushed {
        let expected = convention_link(g, top.sym, m.order);
        if top.link != expected {
            out.push(ViolationKind::Link {
                symbol: top.sym,
                found: top.link,
                expected,
            });
        }
    }
    let node = g.node(top.sym.into());
    if node.kind != NodeKind::Var {
        return out;
    }
    let v = node.var.expect("variables are bound");
    let binder = Sym::from(v.binder);
    let pv = c.stack.top_symbols();
    let at = pv.len().checked_sub(1 + v.span);
    let dec = order_decomposition(&c.stack, node.order, g);
    let last = dec.last().copied();
    if !last.is_some_and(|e| e.symbol.sym == binder && Some(e.position) == at) {
        out.push(ViolationKind::BinderNotLast {
            var: top.sym,
            binder,
            found: last,
        });
    }
    let found = at.map(|i| pv[i].sym);
    if found != Some(binder) {
        out.push(ViolationKind::Span {
            var: top.sym,
            binder,
            found,
        });
    }
    out
}
