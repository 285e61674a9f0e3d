use std::collections::VecDeque;

use serde::Serialize;

use crate::cpda::{Configuration, Machine, Op, StepOutcome};

use super::PdaMachine;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LockstepReport {
    pub steps: usize,
    pub collapses: usize,
    pub stack_mismatches: usize,
    pub outcome_mismatches: usize,
    pub collapse_mismatches: usize,
    pub first_mismatch: Option<String>,
}

impl LockstepReport {
    pub fn is_clean(&self) -> bool {
        self.stack_mismatches == 0 && self.outcome_mismatches == 0 && self.collapse_mismatches == 0
    }

    fn note(&mut self, what: impl FnOnce() -> String) {
        if self.first_mismatch.is_none() {
            self.first_mismatch = Some(what());
        }
    }
}

/// Runs both machines side by side over all branches for at most `steps`
/// `→` steps, comparing link-erased stacks after every step and after every
/// collapse.
pub fn lockstep_check(cpda: &Machine, pda: &PdaMachine, steps: usize) -> LockstepReport {
    let mut r = LockstepReport::default();
    let mut queue: VecDeque<(Configuration, Configuration)> = VecDeque::new();
    let (a0, b0) = (cpda.initial().clone(), pda.initial().clone());
    if !a0.stack.erased_eq(&b0.stack) {
        r.stack_mismatches += 1;
        r.note(|| "initial stacks differ".into());
    }
    queue.push_back((a0, b0));
    while r.steps < steps {
        let Some((a, b)) = queue.pop_front() else { break };
        r.steps += 1;
        let (ma, mb) = (cpda.micro_step(&a), pda.micro_step(&b));
        for ((oa, sa), (ob, sb)) in ma.trace.iter().zip(&mb.trace) {
            if *oa == Op::Collapse {
                r.collapses += 1;
                if !matches!(ob, Op::PopForCollapse { .. }) || !sa.erased_eq(sb) {
                    r.collapse_mismatches += 1;
                    let step = r.steps;
                    r.note(|| format!("step {}: collapse gives {} but {} gives {}", step, cpda.render_stack(sa), ob, pda.render_stack(sb)));
                }
            }
        }
        match (ma.outcome, mb.outcome) {
            (StepOutcome::Internal(x), StepOutcome::Internal(y)) => {
                if !x.stack.erased_eq(&y.stack) {
                    r.stack_mismatches += 1;
                    let step = r.steps;
                    r.note(|| format!("step {}: {} vs {}", step, cpda.render_stack(&x.stack), pda.render_stack(&y.stack)));
                    continue;
                }
                queue.push_back((x, y));
            }
            (StepOutcome::Output { terminal: f, succs: xs }, StepOutcome::Output { terminal: g, succs: ys })
                if f == g && xs.len() == ys.len() =>
            {
                for (x, y) in xs.into_iter().zip(ys) {
                    if !x.stack.erased_eq(&y.stack) {
                        r.stack_mismatches += 1;
                        let step = r.steps;
                        r.note(|| format!("step {}: successor of {} differs", step, f));
                        continue;
                    }
                    queue.push_back((x, y));
                }
            }
            (StepOutcome::Stuck(_), StepOutcome::Stuck(_)) => {}
            (x, y) => {
                r.outcome_mismatches += 1;
                let step = r.steps;
                r.note(|| format!("step {}: outcomes differ: {} vs {}", step, describe(&x), describe(&y)));
            }
        }
    }
    r
}

fn describe(o: &StepOutcome) -> String {
    match o {
        StepOutcome::Internal(_) => "internal".into(),
        StepOutcome::Output { terminal, succs } => format!("output {}/{}", terminal, succs.len()),
        StepOutcome::Stuck(r) => format!("stuck ({})", r),
    }
}
