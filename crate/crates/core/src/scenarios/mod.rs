//! The interferometer experiments, each available as DSL text and as
//! hand-built plans for the toy and quantum engines.
//!
//! Outcome vocabulary:
//!
//! | label | meaning |
//! |---|---|
//! | `detector_L`, `detector_R` | output-port detector absorbed the excitation |
//! | `fired`, `silent` | nondestructive which-way detector in arm `R` |
//! | `absorbed` | destructive which-way detector absorbed the excitation; the run ends |
//! | `exploded`, `safe` | bomb in arm `R` detonated (run ends) or stayed quiet |
//! | `a0`, `a1`, `a+`, `a-` | ancilla outcome of the eraser |
//! | `no_click` | nothing recorded |
//!
//! Compound outcomes join measurement labels and then port labels with `" & "`.

pub mod quantum_engine;
pub mod toy_engine;

use std::f64::consts::PI;
use std::fmt;

use crate::circuit_dsl::{parse, Program};
use crate::error::{Error, Result};
use crate::outcome::{OutcomeDistribution, DETECTOR_L, DETECTOR_R};
use crate::phase_space::RegisterShape;
use crate::plan::{MeasureLabels, Preparation, QuantumOp, QuantumPlan, ToyOp, ToyPlan};
use crate::quantum_ref::{
    bs_unitary, cnot_unitary, phase_unitary, swap_unitary, Description, MeasurementBasis, QuantumGate, StateVector,
};
use crate::toy_dynamics::ToyGate;
use crate::toy_measurement::{Basis, DisturbanceKind};

/// Which engine produces a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Toy,
    Quantum,
    Automaton { shots: u64, seed: u64 },
    MonteCarlo { shots: u64, seed: u64 },
}

/// What the delayed-choice experimenter inserts into arm `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Phase(u8),
    Detector,
}

/// When the delayed choice is made relative to the first beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Before,
    After,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScenarioParams {
    pub phase: Option<u8>,
    pub kind: Option<DisturbanceKind>,
    pub functional: Option<bool>,
    pub basis: Option<Basis>,
    pub choice: Option<Choice>,
    pub timing: Option<Timing>,
    /// Eraser only: measure the ancilla after the port detectors.
    pub ancilla_after_ports: Option<bool>,
    pub mirror_present: Option<bool>,
}

impl fmt::Display for ScenarioParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(s) = self.phase {
            parts.push(format!("phase={}", if s == 1 { "pi" } else { "0" }));
        }
        if let Some(k) = self.kind {
            parts.push(format!("kind={}", if k == DisturbanceKind::Destructive { "destructive" } else { "nondestructive" }));
        }
        if let Some(b) = self.functional {
            parts.push(format!("functional={b}"));
        }
        if let Some(b) = self.basis {
            parts.push(format!("basis={b:?}"));
        }
        if let Some(c) = self.choice {
            parts.push(match c {
                Choice::Phase(s) => format!("choice=phase({})", if s == 1 { "pi" } else { "0" }),
                Choice::Detector => "choice=detector".into(),
            });
        }
        if let Some(t) = self.timing {
            parts.push(format!("timing={}", if t == Timing::Before { "before" } else { "after" }));
        }
        if let Some(a) = self.ancilla_after_ports {
            parts.push(format!("ancilla={}", if a { "after-ports" } else { "before-ports" }));
        }
        if let Some(m) = self.mirror_present {
            parts.push(format!("mirror={m}"));
        }
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: &'static str,
    pub params: ScenarioParams,
    /// Program text in the circuit language.
    pub dsl: String,
    pub toy: ToyPlan,
    pub quantum: QuantumPlan,
}

pub const SCENARIO_NAMES: &[&str] =
    &["mzi_phase", "mzi_whichway", "bomb_tester", "delayed_choice", "quantum_eraser", "mirror_removed"];

impl ScenarioSpec {
    pub fn program(&self) -> Result<Program> {
        Ok(parse(&self.dsl)?)
    }

    /// `name(params)`, used in reports.
    pub fn title(&self) -> String {
        format!("{}({})", self.name, self.params)
    }

    pub fn run(&self, engine: Engine) -> Result<OutcomeDistribution> {
        match engine {
            Engine::Toy => toy_engine::run_exact(&self.toy),
            Engine::Quantum => quantum_engine::run_exact(&self.quantum),
            Engine::Automaton { shots, seed } => crate::automaton::run_experiment(self, shots, seed),
            Engine::MonteCarlo { shots, seed } => {
                let report = crate::montecarlo::estimate(&self.toy, shots, seed)?;
                Ok(report.distribution())
            }
        }
    }

    pub fn mzi_phase(s: u8) -> Self {
        let s = s & 1;
        build(
            "mzi_phase",
            ScenarioParams { phase: Some(s), ..Default::default() },
            Device::Phase(s),
            None,
        )
    }

    pub fn mzi_whichway(kind: DisturbanceKind) -> Self {
        let labels = match kind {
            DisturbanceKind::Nondestructive => ("silent", "fired"),
            DisturbanceKind::Destructive => ("silent", "absorbed"),
        };
        build(
            "mzi_whichway",
            ScenarioParams { kind: Some(kind), ..Default::default() },
            Device::Detector(kind, labels),
            None,
        )
    }

    /// A working bomb absorbs the excitation that reaches it and ends the run.
    pub fn bomb_tester(functional: bool) -> Self {
        let device = if functional {
            Device::Detector(DisturbanceKind::Destructive, ("safe", "exploded"))
        } else {
            Device::Empty
        };
        build("bomb_tester", ScenarioParams { functional: Some(functional), ..Default::default() }, device, None)
    }

    pub fn delayed_choice(choice: Choice, timing: Timing) -> Self {
        let device = match choice {
            Choice::Phase(s) => Device::Phase(s & 1),
            Choice::Detector => Device::Detector(DisturbanceKind::Nondestructive, ("silent", "fired")),
        };
        build(
            "delayed_choice",
            ScenarioParams { choice: Some(choice), timing: Some(timing), ..Default::default() },
            device,
            Some(timing),
        )
    }

    pub fn quantum_eraser(basis: Basis, ancilla_after_ports: bool) -> Self {
        let (v, zero, one) = match basis {
            Basis::Q => ("Q", "a0", "a1"),
            Basis::P => ("P", "a+", "a-"),
        };
        let measure = format!("measure {v} A as {zero}/{one};\n");
        let ports = "detect L as detector_L;\ndetect R as detector_R;\n";
        let (first, second) = if ancilla_after_ports { (ports.to_string(), measure) } else { (measure, ports.to_string()) };
        let dsl = format!(
            "# quantum eraser: the ancilla records which-way information from arm R\n\
             mode L R;\nancilla A;\nsource L;\nvacuum R;\nbs L R;\ncnot R A;\nbs L R;\n{first}{second}"
        );
        let labels = MeasureLabels::new(Some(zero), Some(one));
        let toy_measure = ToyOp::MeasureAncilla { ancilla: 0, basis, labels: labels.clone() };
        let toy_ports = vec![detect_toy(0, DETECTOR_L), detect_toy(1, DETECTOR_R)];
        let mut toy_ops = vec![
            ToyOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 }),
            ToyOp::Gate(ToyGate::Cnot { control: 1, target: 0 }),
            ToyOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 }),
        ];
        let qbasis = match basis {
            Basis::Q => MeasurementBasis::computational(2, zero, one),
            Basis::P => MeasurementBasis::conjugate(2, zero, one),
        };
        let q_measure = QuantumOp::Measure { basis: qbasis, destructive: false, labels };
        let q_ports = vec![detect_q(0, DETECTOR_L), detect_q(1, DETECTOR_R)];
        let mut q_ops = vec![
            QuantumOp::Gate(bs_unitary(Description::Second)),
            QuantumOp::Gate(cnot_unitary(Description::Second)),
            QuantumOp::Gate(bs_unitary(Description::Second)),
        ];
        if ancilla_after_ports {
            toy_ops.extend(toy_ports);
            toy_ops.push(toy_measure);
            q_ops.extend(q_ports);
            q_ops.push(q_measure);
        } else {
            toy_ops.push(toy_measure);
            toy_ops.extend(toy_ports);
            q_ops.push(q_measure);
            q_ops.extend(q_ports);
        }
        ScenarioSpec {
            name: "quantum_eraser",
            params: ScenarioParams {
                basis: Some(basis),
                ancilla_after_ports: Some(ancilla_after_ports),
                ..Default::default()
            },
            dsl,
            toy: ToyPlan {
                name: "quantum_eraser".into(),
                shape: RegisterShape::new(2, 1),
                preparations: vec![Preparation::Source, Preparation::Vacuum],
                ops: toy_ops,
            },
            quantum: QuantumPlan {
                name: "quantum_eraser".into(),
                initial: StateVector::basis(&["L", "R", "A"], &[1, 0, 0]).expect("three qubits"),
                ops: q_ops,
            },
        }
    }

    /// The arm-`R` mirror is replaced by a swap into an environment mode `E`,
    /// which then absorbs whatever escaped.
    pub fn mirror_removed() -> Self {
        let dsl = "# arm R loses its mirror: the excitation escapes into the environment mode E\n\
                   mode L R E;\nsource L;\nvacuum R;\nvacuum E;\nbs L R;\nswap R E;\n\
                   measure N E destructive as _/_;\nbs L R;\ndetect L as detector_L;\ndetect R as detector_R;\n"
            .to_string();
        let toy_ops = vec![
            ToyOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 }),
            ToyOp::Gate(ToyGate::SwapModes { a: 1, b: 2 }),
            ToyOp::MeasureN { mode: 2, kind: DisturbanceKind::Destructive, labels: MeasureLabels::default() },
            ToyOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 }),
            detect_toy(0, DETECTOR_L),
            detect_toy(1, DETECTOR_R),
        ];
        let q_ops = vec![
            QuantumOp::Gate(bs_unitary(Description::Second)),
            QuantumOp::Gate(swap_unitary(1, 2)),
            QuantumOp::Measure {
                basis: MeasurementBasis::computational(2, "0", "1"),
                destructive: true,
                labels: MeasureLabels::default(),
            },
            QuantumOp::Gate(bs_unitary(Description::Second)),
            detect_q(0, DETECTOR_L),
            detect_q(1, DETECTOR_R),
        ];
        ScenarioSpec {
            name: "mirror_removed",
            params: ScenarioParams { mirror_present: Some(false), ..Default::default() },
            dsl,
            toy: ToyPlan {
                name: "mirror_removed".into(),
                shape: RegisterShape::modes(3),
                preparations: vec![Preparation::Source, Preparation::Vacuum, Preparation::Vacuum],
                ops: toy_ops,
            },
            quantum: QuantumPlan {
                name: "mirror_removed".into(),
                initial: StateVector::basis(&["L", "R", "E"], &[1, 0, 0]).expect("three qubits"),
                ops: q_ops,
            },
        }
    }
}

enum Device {
    Empty,
    Phase(u8),
    Detector(DisturbanceKind, (&'static str, &'static str)),
}

fn detect_toy(mode: usize, label: &str) -> ToyOp {
    ToyOp::Detect { mode, label: label.into() }
}

fn detect_q(qubit: usize, label: &str) -> QuantumOp {
    QuantumOp::Detect { qubit, label: label.into() }
}

fn identity_q() -> QuantumOp {
    let one = crate::quantum_ref::C::new(1.0, 0.0);
    let zero = crate::quantum_ref::C::new(0.0, 0.0);
    QuantumOp::Gate(QuantumGate { matrix: vec![vec![one, zero], vec![zero, one]], targets: vec![0] })
}

/// Two-mode interferometer with a device in arm `R`. A delayed-choice timing
/// places an identity marker where the choice is made.
fn build(name: &'static str, params: ScenarioParams, device: Device, timing: Option<Timing>) -> ScenarioSpec {
    let (dsl_device, toy_device, q_device) = match device {
        Device::Empty => (String::new(), vec![], vec![]),
        Device::Phase(s) => (
            format!("phase R {};\n", if s == 1 { "pi" } else { "0" }),
            vec![ToyOp::Gate(ToyGate::PhaseShift { mode: 1, s })],
            vec![QuantumOp::Gate(phase_unitary(if s == 1 { PI } else { 0.0 }, Description::Second))],
        ),
        Device::Detector(kind, (zero, one)) => {
            let k = if kind == DisturbanceKind::Destructive { "destructive" } else { "nondestructive" };
            let labels = MeasureLabels::new(Some(zero), Some(one));
            (
                format!("measure N R {k} as {zero}/{one};\n"),
                vec![ToyOp::MeasureN { mode: 1, kind, labels: labels.clone() }],
                vec![QuantumOp::Measure {
                    basis: MeasurementBasis::computational(1, "0", "1"),
                    destructive: kind == DisturbanceKind::Destructive,
                    labels,
                }],
            )
        }
    };
    let comment = match timing {
        Some(Timing::Before) => "# the arm device is chosen before the photon reaches the first beamsplitter\n",
        Some(Timing::After) => "# the arm device is chosen after the photon has passed the first beamsplitter\n",
        None => "",
    };
    let dsl = format!(
        "{comment}mode L R;\nsource L;\nvacuum R;\nbs L R;\n{dsl_device}bs L R;\ndetect L as detector_L;\ndetect R as detector_R;\n"
    );
    let mut toy_ops = vec![ToyOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 })];
    let mut q_ops = vec![QuantumOp::Gate(bs_unitary(Description::Second))];
    toy_ops.extend(toy_device);
    q_ops.extend(q_device);
    toy_ops.push(ToyOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 }));
    q_ops.push(QuantumOp::Gate(bs_unitary(Description::Second)));
    toy_ops.extend([detect_toy(0, DETECTOR_L), detect_toy(1, DETECTOR_R)]);
    q_ops.extend([detect_q(0, DETECTOR_L), detect_q(1, DETECTOR_R)]);
    match timing {
        Some(Timing::Before) => {
            toy_ops.insert(0, ToyOp::Gate(ToyGate::Identity));
            q_ops.insert(0, identity_q());
        }
        Some(Timing::After) => {
            toy_ops.insert(1, ToyOp::Gate(ToyGate::Identity));
            q_ops.insert(1, identity_q());
        }
        None => {}
    }
    ScenarioSpec {
        name,
        params,
        dsl,
        toy: ToyPlan {
            name: name.into(),
            shape: RegisterShape::modes(2),
            preparations: vec![Preparation::Source, Preparation::Vacuum],
            ops: toy_ops,
        },
        quantum: QuantumPlan {
            name: name.into(),
            initial: StateVector::basis(&["L", "R"], &[1, 0]).expect("two qubits"),
            ops: q_ops,
        },
    }
}

/// Every scenario at every parameter setting.
pub fn all_settings() -> Vec<ScenarioSpec> {
    let mut v = vec![ScenarioSpec::mzi_phase(0), ScenarioSpec::mzi_phase(1)];
    v.extend([DisturbanceKind::Nondestructive, DisturbanceKind::Destructive].map(ScenarioSpec::mzi_whichway));
    v.extend([true, false].map(ScenarioSpec::bomb_tester));
    for choice in [Choice::Phase(0), Choice::Phase(1), Choice::Detector] {
        for timing in [Timing::Before, Timing::After] {
            v.push(ScenarioSpec::delayed_choice(choice, timing));
        }
    }
    for basis in [Basis::Q, Basis::P] {
        for after in [false, true] {
            v.push(ScenarioSpec::quantum_eraser(basis, after));
        }
    }
    v.push(ScenarioSpec::mirror_removed());
    v
}

/// Looks a scenario up by name with parameters, falling back to defaults
/// (phase 0, nondestructive, functional bomb, basis P, phase-0 choice made
/// after the first beamsplitter, ancilla measured first).
pub fn build_scenario(name: &str, params: &ScenarioParams) -> Result<ScenarioSpec> {
    Ok(match name {
        "mzi_phase" => ScenarioSpec::mzi_phase(params.phase.unwrap_or(0)),
        "mzi_whichway" => ScenarioSpec::mzi_whichway(params.kind.unwrap_or(DisturbanceKind::Nondestructive)),
        "bomb_tester" => ScenarioSpec::bomb_tester(params.functional.unwrap_or(true)),
        "delayed_choice" => ScenarioSpec::delayed_choice(
            params.choice.unwrap_or(Choice::Phase(params.phase.unwrap_or(0))),
            params.timing.unwrap_or(Timing::After),
        ),
        "quantum_eraser" => {
            ScenarioSpec::quantum_eraser(params.basis.unwrap_or(Basis::P), params.ancilla_after_ports.unwrap_or(false))
        }
        "mirror_removed" => ScenarioSpec::mirror_removed(),
        other => return Err(Error::UnknownScenario(other.to_string())),
    })
}

pub fn mzi_phase(s: u8, engine: Engine) -> Result<OutcomeDistribution> {
    ScenarioSpec::mzi_phase(s).run(engine)
}

pub fn mzi_whichway(kind: DisturbanceKind, engine: Engine) -> Result<OutcomeDistribution> {
    ScenarioSpec::mzi_whichway(kind).run(engine)
}

pub fn bomb_tester(functional: bool, engine: Engine) -> Result<OutcomeDistribution> {
    ScenarioSpec::bomb_tester(functional).run(engine)
}

pub fn delayed_choice(choice: Choice, timing: Timing, engine: Engine) -> Result<OutcomeDistribution> {
    ScenarioSpec::delayed_choice(choice, timing).run(engine)
}

pub fn quantum_eraser(basis: Basis, engine: Engine) -> Result<OutcomeDistribution> {
    ScenarioSpec::quantum_eraser(basis, false).run(engine)
}

pub fn mirror_removed(engine: Engine) -> Result<OutcomeDistribution> {
    ScenarioSpec::mirror_removed().run(engine)
}
