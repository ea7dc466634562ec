//! Toy field theory simulators for single-excitation interference
//! experiments, with a quantum reference engine, a cellular-automaton
//! realization, an ensemble sampler and a small circuit language.

pub mod automaton;
pub mod checks;
pub mod circuit_dsl;
pub mod error;
pub mod first_quantized;
pub mod montecarlo;
pub mod outcome;
pub mod phase_space;
pub mod plan;
pub mod quantum_ref;
pub mod scenarios;
pub mod toy_dynamics;
pub mod toy_measurement;

pub use error::{Error, Result};
