use super::{MeasuredVar, OutcomeLabels, PhaseLiteral, Program, Stmt};
use crate::automaton::{Device, MziLayout};
use crate::error::{Error, Result};
use crate::phase_space::{RegisterShape, MAX_SUBSYSTEMS};
use crate::plan::{MeasureLabels, Preparation, QuantumOp, QuantumPlan, ToyOp, ToyPlan};
use crate::quantum_ref::{
    bs_unitary, cnot_unitary, phase_unitary, swap_unitary, Description, MeasurementBasis, StateVector, MAX_QUBITS,
};
use crate::toy_dynamics::ToyGate;
use crate::toy_measurement::{Basis, DisturbanceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Toy,
    Quantum,
    Automaton,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompiledPlan {
    Toy(ToyPlan),
    Quantum(QuantumPlan),
    Automaton(MziLayout),
}

pub fn compile(program: &Program, target: Target) -> Result<CompiledPlan> {
    Ok(match target {
        Target::Toy => CompiledPlan::Toy(compile_toy(program)?),
        Target::Quantum => CompiledPlan::Quantum(compile_quantum(program)?),
        Target::Automaton => CompiledPlan::Automaton(compile_automaton(program)?),
    })
}

fn labels(l: &OutcomeLabels) -> MeasureLabels {
    MeasureLabels { zero: l.for_value(0).map(str::to_string), one: l.for_value(1).map(str::to_string) }
}

fn detect_label(l: &str) -> Option<String> {
    (l != super::SILENT_LABEL).then(|| l.to_string())
}

fn mode(p: &Program, name: &str) -> usize {
    p.mode_index(name).expect("parser checks identifiers")
}

fn ancilla(p: &Program, name: &str) -> usize {
    p.ancilla_index(name).expect("parser checks identifiers")
}

fn preparations(p: &Program) -> Vec<Preparation> {
    let mut preps = vec![Preparation::Vacuum; p.modes.len()];
    for s in &p.stmts {
        if let Stmt::Source(m) = s {
            preps[mode(p, m)] = Preparation::Source;
        }
    }
    preps
}

fn basis(var: MeasuredVar) -> Basis {
    if var == MeasuredVar::P {
        Basis::P
    } else {
        Basis::Q
    }
}

pub fn compile_toy(p: &Program) -> Result<ToyPlan> {
    let shape = RegisterShape::new(p.modes.len(), p.ancillas.len());
    if shape.subsystems() > MAX_SUBSYSTEMS {
        return Err(Error::RegisterTooLarge(shape.subsystems()));
    }
    let mut ops = Vec::new();
    for s in &p.stmts {
        let op = match s {
            Stmt::Source(_) | Stmt::Vacuum(_) => continue,
            Stmt::Bs(a, b) => ToyOp::Gate(ToyGate::Beamsplitter { a: mode(p, a), b: mode(p, b) }),
            Stmt::Phase(m, lit) => ToyOp::Gate(ToyGate::PhaseShift { mode: mode(p, m), s: lit.bit() }),
            Stmt::Cnot(m, a) => ToyOp::Gate(ToyGate::Cnot { control: mode(p, m), target: ancilla(p, a) }),
            Stmt::Swap(a, b) => ToyOp::Gate(ToyGate::SwapModes { a: mode(p, a), b: mode(p, b) }),
            Stmt::Measure { var: MeasuredVar::N, target, kind, labels: l } => ToyOp::MeasureN {
                mode: mode(p, target),
                kind: kind.unwrap_or(DisturbanceKind::Nondestructive),
                labels: labels(l),
            },
            Stmt::Measure { var, target, labels: l, .. } => {
                ToyOp::MeasureAncilla { ancilla: ancilla(p, target), basis: basis(*var), labels: labels(l) }
            }
            Stmt::Detect { target, label } => match detect_label(label) {
                Some(label) => ToyOp::Detect { mode: mode(p, target), label },
                // A silent detector still absorbs.
                None => ToyOp::MeasureN {
                    mode: mode(p, target),
                    kind: DisturbanceKind::Destructive,
                    labels: MeasureLabels::default(),
                },
            },
        };
        ops.push(op);
    }
    let plan = ToyPlan { name: "program".into(), shape, preparations: preparations(p), ops };
    plan.validate()?;
    Ok(plan)
}

pub fn compile_quantum(p: &Program) -> Result<QuantumPlan> {
    let n = p.modes.len() + p.ancillas.len();
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(n));
    }
    let preps = preparations(p);
    let mut bits: Vec<u8> = preps.iter().map(|x| u8::from(*x == Preparation::Source)).collect();
    bits.extend(std::iter::repeat_n(0, p.ancillas.len()));
    let names: Vec<&str> = p.modes.iter().chain(&p.ancillas).map(String::as_str).collect();
    let initial = StateVector::basis(&names, &bits)?;
    let anc = |a: &str| p.modes.len() + ancilla(p, a);
    let mut ops = Vec::new();
    for s in &p.stmts {
        let op = match s {
            Stmt::Source(_) | Stmt::Vacuum(_) => continue,
            Stmt::Bs(a, b) => QuantumOp::Gate(bs_unitary(Description::Second).on(&[mode(p, a), mode(p, b)])),
            Stmt::Phase(m, lit) => QuantumOp::Gate(phase_unitary(lit.angle(), Description::Second).on(&[mode(p, m)])),
            Stmt::Cnot(m, a) => QuantumOp::Gate(cnot_unitary(Description::Second).on(&[mode(p, m), anc(a)])),
            Stmt::Swap(a, b) => QuantumOp::Gate(swap_unitary(mode(p, a), mode(p, b))),
            Stmt::Measure { var: MeasuredVar::N, target, kind, labels: l } => QuantumOp::Measure {
                basis: MeasurementBasis::computational(mode(p, target), "0", "1"),
                destructive: *kind == Some(DisturbanceKind::Destructive),
                labels: labels(l),
            },
            Stmt::Measure { var: MeasuredVar::Q, target, labels: l, .. } => QuantumOp::Measure {
                basis: MeasurementBasis::computational(anc(target), "a0", "a1"),
                destructive: false,
                labels: labels(l),
            },
            Stmt::Measure { target, labels: l, .. } => QuantumOp::Measure {
                basis: MeasurementBasis::conjugate(anc(target), "a+", "a-"),
                destructive: false,
                labels: labels(l),
            },
            Stmt::Detect { target, label } => match detect_label(label) {
                Some(label) => QuantumOp::Detect { qubit: mode(p, target), label },
                None => QuantumOp::Measure {
                    basis: MeasurementBasis::computational(mode(p, target), "0", "1"),
                    destructive: true,
                    labels: MeasureLabels::default(),
                },
            },
        };
        ops.push(op);
    }
    Ok(QuantumPlan { name: "program".into(), initial, ops })
}

fn unsupported(reason: impl Into<String>) -> Error {
    Error::Unsupported { engine: "automaton", reason: reason.into() }
}

/// Accepts only the interferometer template: source into the first
/// beamsplitter input, an optional device in the second arm, a second
/// beamsplitter, and a detector on each output.
pub fn compile_automaton(p: &Program) -> Result<MziLayout> {
    if !p.ancillas.is_empty() {
        return Err(unsupported("ancillas have no cell layout"));
    }
    if p.modes.len() != 2 {
        return Err(unsupported("the layout has exactly two wires"));
    }
    let ops: Vec<&Stmt> = p.stmts.iter().filter(|s| !s.is_preparation()).collect();
    let (a, b) = match ops.first() {
        Some(Stmt::Bs(a, b)) => (a.clone(), b.clone()),
        _ => return Err(unsupported("the circuit must open with a beamsplitter")),
    };
    let preps = preparations(p);
    if preps[mode(p, &a)] != Preparation::Source || preps[mode(p, &b)] != Preparation::Vacuum {
        return Err(unsupported("the source must feed the first beamsplitter input, the vacuum the second"));
    }
    let mut rest = &ops[1..];
    let device = match rest.first() {
        Some(Stmt::Phase(m, lit)) if *m == b => {
            rest = &rest[1..];
            if *lit == PhaseLiteral::Pi {
                Device::Phase(1)
            } else {
                Device::Empty
            }
        }
        Some(Stmt::Measure { var: MeasuredVar::N, target, kind, labels: l }) if *target == b => {
            rest = &rest[1..];
            Device::Detector { kind: kind.unwrap_or(DisturbanceKind::Nondestructive), labels: labels(l) }
        }
        Some(Stmt::Bs(..)) => Device::Empty,
        Some(other) => return Err(unsupported(format!("`{other}` has no cell realization"))),
        None => return Err(unsupported("missing second beamsplitter")),
    };
    match rest.first() {
        Some(Stmt::Bs(x, y)) if *x == a && *y == b => rest = &rest[1..],
        _ => return Err(unsupported("expected the second beamsplitter after the arm device")),
    }
    let mut port_labels: [Option<String>; 2] = [None, None];
    let mut seen = [false, false];
    for s in rest {
        match s {
            Stmt::Detect { target, label } => {
                let slot = usize::from(*target == b);
                if seen[slot] {
                    return Err(unsupported(format!("second detector on {target}")));
                }
                seen[slot] = true;
                port_labels[slot] = detect_label(label);
            }
            other => return Err(unsupported(format!("`{other}` after the second beamsplitter"))),
        }
    }
    if seen != [true, true] {
        return Err(unsupported("both output ports need a detector"));
    }
    let [l, r] = port_labels;
    Ok(MziLayout { device, port_labels: [l, r] })
}
