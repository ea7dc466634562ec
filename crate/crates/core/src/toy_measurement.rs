//! Measurement in the toy theory.
//!
//! A measurement conditions on the observed value and then disturbs the
//! conjugate variable. The intermediate conditioned state can break the
//! epistemic restriction, so the two steps are only exposed together.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::outcome::Prob;
use crate::phase_space::{AncillaState, EpistemicState, Functional, ModeState, PhysicalState, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DisturbanceKind {
    Nondestructive,
    Destructive,
}

/// The disturbance applied to the measured subsystem in one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Disturbance {
    Identity,
    Flip,
    Reset0,
    Reset1,
}

impl DisturbanceKind {
    /// The two equally likely disturbance functions.
    pub fn choices(self) -> [Disturbance; 2] {
        match self {
            DisturbanceKind::Nondestructive => [Disturbance::Identity, Disturbance::Flip],
            DisturbanceKind::Destructive => [Disturbance::Reset0, Disturbance::Reset1],
        }
    }
}

impl Disturbance {
    pub fn apply(self, bit: u8) -> u8 {
        match self {
            Disturbance::Identity => bit,
            Disturbance::Flip => bit ^ 1,
            Disturbance::Reset0 => 0,
            Disturbance::Reset1 => 1,
        }
    }
}

/// Basis of an ancilla measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    /// Coordinate `Q̄`, outcomes `a0`/`a1`.
    Q,
    /// Momentum `P̄`, outcomes `a+`/`a-`.
    P,
}

impl Basis {
    pub fn var(self, ancilla: usize) -> Var {
        match self {
            Basis::Q => Var::Q(ancilla),
            Basis::P => Var::P(ancilla),
        }
    }

    pub fn outcome_name(self, value: u8) -> &'static str {
        match (self, value) {
            (Basis::Q, 0) => "a0",
            (Basis::Q, _) => "a1",
            (Basis::P, 0) => "a+",
            (Basis::P, _) => "a-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub variable: Functional,
    pub value: u8,
    pub probability: Prob,
    pub posterior: EpistemicState,
}

/// Nonzero-probability values of `variable`.
pub fn outcome_distribution(state: &EpistemicState, variable: Functional) -> Vec<(u8, Prob)> {
    outcome_distribution_exhaustive(state, variable).into_iter().filter(|(_, p)| *p.numer() != 0).collect()
}

/// Both values of `variable`, zero-probability ones included.
pub fn outcome_distribution_exhaustive(state: &EpistemicState, variable: Functional) -> Vec<(u8, Prob)> {
    (0..2).map(|v| (v, state.probability(variable, v))).collect()
}

/// Occupation measurement of one mode, with the full update for each outcome.
pub fn measure_occupation(state: &EpistemicState, mode: usize, kind: DisturbanceKind) -> Result<Vec<MeasurementOutcome>> {
    let shape = state.shape();
    let n = Functional::of(&shape, Var::N(mode))?;
    let n_bit = shape.bit(Var::N(mode))?;
    let mut out = Vec::new();
    for (value, probability) in outcome_distribution(state, n) {
        let conditioned = state.condition(n, value)?;
        let posterior = match kind {
            DisturbanceKind::Nondestructive => conditioned.randomize(Var::Phi(mode))?,
            DisturbanceKind::Destructive => {
                conditioned.map_codes(|c| c & !(1 << n_bit)).randomize(Var::Phi(mode))?
            }
        };
        out.push(MeasurementOutcome { variable: n, value, probability, posterior });
    }
    Ok(out)
}

/// Ancilla measurement: condition on the chosen bit, randomize its conjugate.
pub fn measure_ancilla(state: &EpistemicState, ancilla: usize, basis: Basis) -> Result<Vec<MeasurementOutcome>> {
    let shape = state.shape();
    let var = basis.var(ancilla);
    let f = Functional::of(&shape, var)?;
    let mut out = Vec::new();
    for (value, probability) in outcome_distribution(state, f) {
        let posterior = state.condition(f, value)?.randomize(var.conjugate())?;
        out.push(MeasurementOutcome { variable: f, value, probability, posterior });
    }
    Ok(out)
}

/// Deterministic part of a single-run occupation measurement.
pub fn apply_occupation_disturbance(state: PhysicalState, mode: usize, f: Disturbance) -> PhysicalState {
    let m = state.mode(mode);
    let n = match f {
        Disturbance::Identity | Disturbance::Flip => m.n,
        Disturbance::Reset0 | Disturbance::Reset1 => 0,
    };
    state.with_mode(mode, ModeState::new(n, f.apply(m.phi)))
}

/// Deterministic part of a single-run ancilla measurement.
pub fn apply_ancilla_disturbance(state: PhysicalState, ancilla: usize, basis: Basis, f: Disturbance) -> PhysicalState {
    let a = state.ancilla(ancilla);
    let next = match basis {
        Basis::Q => AncillaState::new(a.q, f.apply(a.p)),
        Basis::P => AncillaState::new(f.apply(a.q), a.p),
    };
    state.with_ancilla(ancilla, next)
}

/// Reads `N` of `mode` and applies a disturbance drawn from `rng`.
pub fn sample_measurement<R: Rng + ?Sized>(
    state: PhysicalState,
    mode: usize,
    kind: DisturbanceKind,
    rng: &mut R,
) -> Result<(u8, PhysicalState)> {
    let f = kind.choices()[rng.random_range(0..2)];
    sample_measurement_with(state, mode, f)
}

/// As [`sample_measurement`] with the disturbance chosen by the caller.
pub fn sample_measurement_with(state: PhysicalState, mode: usize, f: Disturbance) -> Result<(u8, PhysicalState)> {
    state.shape().check_mode(mode)?;
    Ok((state.mode(mode).n, apply_occupation_disturbance(state, mode, f)))
}

pub fn sample_ancilla_measurement<R: Rng + ?Sized>(
    state: PhysicalState,
    ancilla: usize,
    basis: Basis,
    rng: &mut R,
) -> Result<(u8, PhysicalState)> {
    state.shape().check_ancilla(ancilla)?;
    let f = DisturbanceKind::Nondestructive.choices()[rng.random_range(0..2)];
    let a = state.ancilla(ancilla);
    let value = match basis {
        Basis::Q => a.q,
        Basis::P => a.p,
    };
    Ok((value, apply_ancilla_disturbance(state, ancilla, basis, f)))
}
