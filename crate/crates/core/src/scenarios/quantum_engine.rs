//! Exact quantum-engine execution by enumeration of projective branches.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::outcome::{accumulate, join_labels, OutcomeDistribution, Prob};
use crate::plan::{QuantumOp, QuantumPlan};
use crate::quantum_ref::{exactify, measure_projective, pauli_x, MeasurementBasis, StateVector, NORM_TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBranch {
    pub state: StateVector,
    pub probability: f64,
    pub measure_labels: Vec<String>,
    pub detect_labels: Vec<String>,
    pub terminated: bool,
}

impl QuantumBranch {
    pub fn label(&self) -> String {
        let all: Vec<&String> = self.measure_labels.iter().chain(&self.detect_labels).collect();
        join_labels(&all)
    }
}

pub fn run_branches(plan: &QuantumPlan) -> Result<Vec<QuantumBranch>> {
    let mut branches = vec![QuantumBranch {
        state: plan.initial.clone(),
        probability: 1.0,
        measure_labels: Vec::new(),
        detect_labels: Vec::new(),
        terminated: false,
    }];
    for op in &plan.ops {
        let mut next = Vec::new();
        for b in branches {
            if b.terminated {
                next.push(b);
                continue;
            }
            match op {
                QuantumOp::Gate(g) => next.push(QuantumBranch { state: g.apply(&b.state)?, ..b }),
                QuantumOp::Measure { basis, destructive, labels } => {
                    for o in measure_projective(&b.state, basis)? {
                        let Some(state) = o.collapsed else { continue };
                        if o.probability <= NORM_TOLERANCE {
                            continue;
                        }
                        let value = o.index as u8;
                        let mut nb = QuantumBranch { state, probability: b.probability * o.probability, ..b.clone() };
                        if let Some(l) = labels.for_value(value) {
                            nb.measure_labels.push(l.to_string());
                        }
                        nb.terminated = *destructive && value == 1;
                        next.push(nb);
                    }
                }
                QuantumOp::Detect { qubit, label } => {
                    let basis = MeasurementBasis::computational(*qubit, "0", "1");
                    for o in measure_projective(&b.state, &basis)? {
                        let Some(state) = o.collapsed else { continue };
                        if o.probability <= NORM_TOLERANCE {
                            continue;
                        }
                        let mut nb = QuantumBranch { state, probability: b.probability * o.probability, ..b.clone() };
                        if o.index == 1 {
                            // The absorbed excitation leaves the mode empty.
                            nb.state = pauli_x(*qubit).apply(&nb.state)?;
                            nb.detect_labels.push(label.clone());
                        }
                        next.push(nb);
                    }
                }
            }
        }
        branches = next;
    }
    Ok(branches)
}

/// Raw Born probabilities per label.
pub fn probabilities(plan: &QuantumPlan) -> Result<BTreeMap<String, f64>> {
    let mut m = BTreeMap::new();
    for b in run_branches(plan)? {
        *m.entry(b.label()).or_insert(0.0) += b.probability;
    }
    Ok(m)
}

/// Probabilities snapped to dyadic rationals.
pub fn distribution(plan: &QuantumPlan) -> Result<BTreeMap<String, Prob>> {
    let mut m = BTreeMap::new();
    for (label, p) in probabilities(plan)? {
        accumulate(&mut m, label, exactify(p)?);
    }
    Ok(m)
}

pub fn run_exact(plan: &QuantumPlan) -> Result<OutcomeDistribution> {
    Ok(OutcomeDistribution::Exact(distribution(plan)?))
}
