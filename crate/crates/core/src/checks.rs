//! Exhaustive property suites, shared by the command line and the test
//! targets.

use std::fmt;

use crate::error::Result;
use crate::first_quantized::{check_commutation, SectorOp};
use crate::montecarlo::{locality_audit, locality_audit_with, standard_update, UpdateFn};
use crate::phase_space::{valid_states, ModeState, PhysicalState, RegisterShape, Subsystem};
use crate::plan::ToyOp;
use crate::scenarios::{all_settings, Engine, ScenarioSpec};
use crate::toy_dynamics::{push_forward, ToyGate};
use crate::toy_measurement::{measure_ancilla, measure_occupation, Basis, Disturbance, DisturbanceKind};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        Self { name, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} ({} checks", self.name, self.checked)?;
        if !self.passed() {
            write!(f, ", {} failures", self.failures.len())?;
        }
        write!(f, ")")?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n  {msg}")?;
        }
        Ok(())
    }
}

/// Toy and quantum engines agree exactly on every scenario setting.
pub fn equivalence() -> Result<CheckReport> {
    let mut r = CheckReport::new("equivalence");
    for spec in all_settings() {
        let toy = spec.run(Engine::Toy)?;
        let quantum = spec.run(Engine::Quantum)?;
        r.expect(toy == quantum, || format!("{}: toy {:?} vs quantum {:?}", spec.title(), toy, quantum));
    }
    Ok(r)
}

/// Every sector circuit of up to three operations drawn from the coarse
/// vocabulary.
pub fn sector_circuits() -> Vec<Vec<SectorOp>> {
    let alphabet = [
        SectorOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 }),
        SectorOp::Gate(ToyGate::PhaseShift { mode: 0, s: 1 }),
        SectorOp::Gate(ToyGate::PhaseShift { mode: 1, s: 1 }),
        SectorOp::Gate(ToyGate::Identity),
        SectorOp::Measure(0),
        SectorOp::Measure(1),
    ];
    let mut out: Vec<Vec<SectorOp>> = vec![vec![]];
    let mut layer: Vec<Vec<SectorOp>> = vec![vec![]];
    for _ in 0..3 {
        layer = layer
            .iter()
            .flat_map(|c| alphabet.iter().map(move |op| c.iter().cloned().chain([*op]).collect()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Coarse-graining commutes with dynamics and measurement.
pub fn coarse_grain() -> Result<CheckReport> {
    let mut r = CheckReport::new("coarse-grain");
    for circuit in sector_circuits() {
        let rep = check_commutation(&circuit)?;
        r.checked += rep.ontic_checks + rep.epistemic_checks;
        r.failures.extend(rep.failures.into_iter().map(|f| format!("{circuit:?}: {f}")));
    }
    Ok(r)
}

/// Destructive and nondestructive occupation measurements give the same
/// probabilities and the same posterior on the unmeasured mode.
pub fn destructive() -> Result<CheckReport> {
    let mut r = CheckReport::new("destructive");
    for s in valid_states(RegisterShape::modes(2))? {
        for m in 0..2 {
            let nd = measure_occupation(&s, m, DisturbanceKind::Nondestructive)?;
            let d = measure_occupation(&s, m, DisturbanceKind::Destructive)?;
            r.expect(nd.len() == d.len(), || format!("{s}: outcome sets differ"));
            let rest = [Subsystem::Mode(1 - m)];
            for (a, b) in nd.iter().zip(&d) {
                r.expect((a.value, a.probability) == (b.value, b.probability), || format!("{s}: probabilities differ"));
                r.expect(a.posterior.marginal(&rest)? == b.posterior.marginal(&rest)?, || {
                    format!("{s}: posterior of mode {} differs on outcome {}", 1 - m, a.value)
                });
            }
        }
    }
    Ok(r)
}

/// Every operation available on `shape`.
pub fn operations(shape: RegisterShape) -> Vec<ToyOp> {
    let mut ops = vec![ToyOp::Gate(ToyGate::Identity)];
    for a in 0..shape.modes {
        for s in 0..2 {
            ops.push(ToyOp::Gate(ToyGate::PhaseShift { mode: a, s }));
        }
        for b in (0..shape.modes).filter(|&b| b != a) {
            ops.push(ToyOp::Gate(ToyGate::Beamsplitter { a, b }));
            ops.push(ToyOp::Gate(ToyGate::SwapModes { a, b }));
        }
        for t in 0..shape.ancillas {
            ops.push(ToyOp::Gate(ToyGate::Cnot { control: a, target: t }));
        }
        for kind in [DisturbanceKind::Nondestructive, DisturbanceKind::Destructive] {
            ops.push(ToyOp::MeasureN { mode: a, kind, labels: Default::default() });
        }
    }
    for t in 0..shape.ancillas {
        for basis in [Basis::Q, Basis::P] {
            ops.push(ToyOp::MeasureAncilla { ancilla: t, basis, labels: Default::default() });
        }
    }
    ops
}

/// All register shapes with one to three subsystems.
pub fn small_shapes() -> Vec<RegisterShape> {
    let mut v = Vec::new();
    for total in 1..=3 {
        for ancillas in 0..=total {
            v.push(RegisterShape::new(total - ancillas, ancillas));
        }
    }
    v
}

/// Every operation maps every valid state to valid states.
pub fn closure() -> Result<CheckReport> {
    let mut r = CheckReport::new("closure");
    for shape in small_shapes() {
        let catalog = valid_states(shape)?;
        for op in operations(shape) {
            for s in &catalog {
                let outs = match &op {
                    ToyOp::Gate(g) => vec![push_forward(s, g)?],
                    ToyOp::MeasureN { mode, kind, .. } => {
                        measure_occupation(s, *mode, *kind)?.into_iter().map(|o| o.posterior).collect()
                    }
                    ToyOp::MeasureAncilla { ancilla, basis, .. } => {
                        measure_ancilla(s, *ancilla, *basis)?.into_iter().map(|o| o.posterior).collect()
                    }
                    ToyOp::Detect { .. } => unreachable!("not in the catalog"),
                };
                for out in outs {
                    r.expect(out.is_valid(), || format!("{op:?} on {shape} maps {s} to invalid {out}"));
                }
            }
        }
    }
    Ok(r)
}

/// Audits which-way and eraser runs, then confirms that a nonlocal update is
/// caught.
pub fn locality(shots: u64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new("locality");
    let plans = [
        ScenarioSpec::mzi_whichway(DisturbanceKind::Nondestructive).toy,
        ScenarioSpec::mzi_whichway(DisturbanceKind::Destructive).toy,
        ScenarioSpec::quantum_eraser(Basis::P, false).toy,
        ScenarioSpec::quantum_eraser(Basis::Q, false).toy,
    ];
    for plan in &plans {
        let audit = locality_audit(plan, shots, seed)?;
        r.checked += audit.events_checked as usize;
        for v in audit.violations.iter().take(5) {
            r.failures.push(format!("{}: run {} event {} changed mode {}", plan.name, v.record.run, v.event, v.mode));
        }
    }
    let faulty: UpdateFn = leaky_update;
    let control = locality_audit_with(&plans[0], shots.min(1000), seed, faulty)?;
    r.expect(!control.holds(), || "injected nonlocal update went unnoticed".into());
    Ok(r)
}

/// Standard update that also flips the phase of mode `L`.
pub fn leaky_update(state: PhysicalState, op: &ToyOp, f: Disturbance) -> (u8, PhysicalState) {
    let (v, s) = standard_update(state, op, f);
    let l = s.mode(0);
    (v, s.with_mode(0, ModeState::new(l.n, l.phi ^ 1)))
}

pub fn all(shots: u64, seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![equivalence()?, coarse_grain()?, destructive()?, closure()?, locality(shots, seed)?])
}
