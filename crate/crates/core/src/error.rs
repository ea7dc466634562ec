use thiserror::Error;

use crate::circuit_dsl::DslError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("register with {0} subsystems exceeds the supported maximum of {max}", max = crate::phase_space::MAX_SUBSYSTEMS)]
    RegisterTooLarge(usize),
    #[error("mode index {index} out of range for a register with {count} modes")]
    ModeOutOfRange { index: usize, count: usize },
    #[error("ancilla index {index} out of range for a register with {count} ancillas")]
    AncillaOutOfRange { index: usize, count: usize },
    #[error("gate needs two distinct modes, got {0} twice")]
    RepeatedMode(usize),
    #[error("empty support")]
    EmptySupport,
    #[error("impossible outcome: no supported state satisfies the condition")]
    ImpossibleOutcome,
    #[error("register shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("empty subsystem selection")]
    EmptySelection,
    #[error("gate is not a bijection on the physical state space")]
    NotBijective,
    #[error("state lies outside the single-excitation sector")]
    OutsideSector,
    #[error("invalid epistemic state: {0}")]
    InvalidState(String),
    #[error("degenerate measurement basis: {0}")]
    DegenerateBasis(String),
    #[error("probability {0} is not within tolerance of a dyadic rational")]
    NotDyadic(String),
    #[error("the {engine} engine cannot host this program: {reason}")]
    Unsupported { engine: &'static str, reason: String },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("map is stochastic; time reversal is only defined for deterministic maps")]
    NotDeterministic,
    #[error(transparent)]
    Dsl(#[from] DslError),
}
