//! Exact toy-engine execution by enumeration of measurement branches.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::outcome::{accumulate, join_labels, OutcomeDistribution, Prob};
use crate::phase_space::EpistemicState;
use crate::plan::{ToyOp, ToyPlan};
use crate::toy_dynamics::push_forward;
use crate::toy_measurement::{measure_ancilla, measure_occupation, DisturbanceKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub state: EpistemicState,
    pub probability: Prob,
    pub measure_labels: Vec<String>,
    pub detect_labels: Vec<String>,
    /// Set once an excitation has been absorbed by a destructive measurement.
    pub terminated: bool,
}

impl Branch {
    pub fn label(&self) -> String {
        let all: Vec<&String> = self.measure_labels.iter().chain(&self.detect_labels).collect();
        join_labels(&all)
    }

    /// Outcome history so far, for display.
    pub fn history(&self) -> String {
        if self.measure_labels.is_empty() && self.detect_labels.is_empty() {
            return "-".into();
        }
        self.label()
    }
}

/// Branches after each operation; entry 0 is the prepared state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub op: Option<ToyOp>,
    pub branches: Vec<Branch>,
}

fn step(branches: Vec<Branch>, op: &ToyOp) -> Result<Vec<Branch>> {
    let mut out = Vec::new();
    for b in branches {
        if b.terminated {
            out.push(b);
            continue;
        }
        match op {
            ToyOp::Gate(g) => out.push(Branch { state: push_forward(&b.state, g)?, ..b }),
            ToyOp::MeasureN { mode, kind, labels } => {
                for o in measure_occupation(&b.state, *mode, *kind)? {
                    let mut nb = Branch { state: o.posterior, probability: b.probability * o.probability, ..b.clone() };
                    if let Some(l) = labels.for_value(o.value) {
                        nb.measure_labels.push(l.to_string());
                    }
                    nb.terminated = *kind == DisturbanceKind::Destructive && o.value == 1;
                    out.push(nb);
                }
            }
            ToyOp::MeasureAncilla { ancilla, basis, labels } => {
                for o in measure_ancilla(&b.state, *ancilla, *basis)? {
                    let mut nb = Branch { state: o.posterior, probability: b.probability * o.probability, ..b.clone() };
                    if let Some(l) = labels.for_value(o.value) {
                        nb.measure_labels.push(l.to_string());
                    }
                    out.push(nb);
                }
            }
            ToyOp::Detect { mode, label } => {
                for o in measure_occupation(&b.state, *mode, DisturbanceKind::Destructive)? {
                    let mut nb = Branch { state: o.posterior, probability: b.probability * o.probability, ..b.clone() };
                    if o.value == 1 {
                        nb.detect_labels.push(label.clone());
                    }
                    out.push(nb);
                }
            }
        }
    }
    Ok(out)
}

fn initial(plan: &ToyPlan) -> Result<Vec<Branch>> {
    Ok(vec![Branch {
        state: plan.initial_state()?,
        probability: Prob::from_integer(1),
        measure_labels: Vec::new(),
        detect_labels: Vec::new(),
        terminated: false,
    }])
}

pub fn run_branches(plan: &ToyPlan) -> Result<Vec<Branch>> {
    plan.ops.iter().try_fold(initial(plan)?, step)
}

pub fn trace(plan: &ToyPlan) -> Result<Vec<TraceStep>> {
    let mut steps = vec![TraceStep { op: None, branches: initial(plan)? }];
    for op in &plan.ops {
        let prev = steps.last().expect("nonempty").branches.clone();
        steps.push(TraceStep { op: Some(op.clone()), branches: step(prev, op)? });
    }
    Ok(steps)
}

pub fn distribution(plan: &ToyPlan) -> Result<BTreeMap<String, Prob>> {
    let mut m = BTreeMap::new();
    for b in run_branches(plan)? {
        accumulate(&mut m, b.label(), b.probability);
    }
    Ok(m)
}

pub fn run_exact(plan: &ToyPlan) -> Result<OutcomeDistribution> {
    Ok(OutcomeDistribution::Exact(distribution(plan)?))
}
