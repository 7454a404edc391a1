use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (‖H − H†‖_F = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (‖U†U − I‖_F = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("{routine} did not converge after {iterations} sweeps")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("factor index {index} out of range for a shape with {factors} factors")]
    InvalidFactor { index: usize, factors: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("a phase angle is only meaningful for CPHASE, not {0}")]
    UnexpectedPhase(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("operator has no nonzero Schmidt coefficient")]
    ZeroOperator,

    #[error("environment vanishes; the local update is undefined")]
    ZeroEnvironment,

    #[error("Pauli-coupling updates support ancilla dimension 2 or 4, got {0}")]
    UnsupportedAncillaDim(usize),

    #[error("site {site} out of range for a circuit with {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
}
