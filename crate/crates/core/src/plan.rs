//! Compiled run plans for the toy and quantum engines.
//!
//! Outcome labels follow one rule on every engine. A measurement records the
//! label attached to the observed value, if any. A detector records its
//! label when it absorbs an excitation. A destructive measurement that
//! absorbs the excitation ends the run. The final label joins measurement
//! labels in program order, then detector labels in program order, with
//! `" & "`; a run that records nothing is `no_click`.

use crate::error::{Error, Result};
use crate::phase_space::{make_ancilla, make_occupied, make_vacuum, EpistemicState, RegisterShape, MAX_SUBSYSTEMS};
use crate::quantum_ref::{MeasurementBasis, QuantumGate, StateVector};
use crate::toy_dynamics::ToyGate;
use crate::toy_measurement::{Basis, DisturbanceKind};

/// Initial condition of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preparation {
    /// One excitation, phase unknown.
    Source,
    /// No excitation, phase unknown.
    Vacuum,
}

/// Labels recorded for the values 0 and 1 of a measurement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MeasureLabels {
    pub zero: Option<String>,
    pub one: Option<String>,
}

impl MeasureLabels {
    pub fn new(zero: Option<&str>, one: Option<&str>) -> Self {
        Self { zero: zero.map(str::to_string), one: one.map(str::to_string) }
    }

    pub fn for_value(&self, value: u8) -> Option<&str> {
        if value == 0 {
            self.zero.as_deref()
        } else {
            self.one.as_deref()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ToyOp {
    Gate(ToyGate),
    MeasureN { mode: usize, kind: DisturbanceKind, labels: MeasureLabels },
    MeasureAncilla { ancilla: usize, basis: Basis, labels: MeasureLabels },
    /// Destructive output-port detector; does not end the run.
    Detect { mode: usize, label: String },
}

impl ToyOp {
    pub fn is_stochastic(&self) -> bool {
        !matches!(self, ToyOp::Gate(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyPlan {
    pub name: String,
    pub shape: RegisterShape,
    pub preparations: Vec<Preparation>,
    pub ops: Vec<ToyOp>,
}

impl ToyPlan {
    pub fn validate(&self) -> Result<()> {
        if self.shape.subsystems() > MAX_SUBSYSTEMS {
            return Err(Error::RegisterTooLarge(self.shape.subsystems()));
        }
        if self.preparations.len() != self.shape.modes {
            return Err(Error::ShapeMismatch {
                expected: format!("{} preparations", self.shape.modes),
                found: self.preparations.len().to_string(),
            });
        }
        for op in &self.ops {
            match op {
                ToyOp::Gate(g) => g.validate(&self.shape)?,
                ToyOp::MeasureN { mode, .. } | ToyOp::Detect { mode, .. } => self.shape.check_mode(*mode)?,
                ToyOp::MeasureAncilla { ancilla, .. } => self.shape.check_ancilla(*ancilla)?,
            }
        }
        Ok(())
    }

    /// Product of the per-mode preparations and fresh `a0` ancillas.
    pub fn initial_state(&self) -> Result<EpistemicState> {
        self.validate()?;
        let mut state: Option<EpistemicState> = None;
        for p in &self.preparations {
            let factor = match p {
                Preparation::Source => make_occupied(1, 0)?,
                Preparation::Vacuum => make_vacuum(1)?,
            };
            state = Some(match state {
                None => factor,
                Some(s) => s.product(&factor)?,
            });
        }
        for _ in 0..self.shape.ancillas {
            let factor = make_ancilla(0);
            state = Some(match state {
                None => factor,
                Some(s) => s.product(&factor)?,
            });
        }
        state.ok_or(Error::EmptySelection)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumOp {
    Gate(QuantumGate),
    /// A destructive measurement ends the run on outcome index 1.
    Measure { basis: MeasurementBasis, destructive: bool, labels: MeasureLabels },
    /// Occupation detector that absorbs the excitation and records `label`.
    Detect { qubit: usize, label: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPlan {
    pub name: String,
    pub initial: StateVector,
    pub ops: Vec<QuantumOp>,
}
