use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameter {s} outside [0, 1]")]
    ParameterOutOfDomain { s: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("boundary loop {loop_index} does not close: gap {gap:.3e} after curve {curve}")]
    OpenChain { loop_index: usize, curve: usize, gap: f64 },

    #[error("curve {curve} in loop {loop_index} is degenerate near s = {s}")]
    DegenerateCurve { loop_index: usize, curve: usize, s: f64 },

    #[error("self-intersection detected: {0}")]
    SelfIntersection(String),

    #[error("point is not on the curve (distance {distance:.3e})")]
    NotOnCurve { distance: f64 },

    #[error("arm length {requested} exceeds half of an adjacent curve length ({limit})")]
    ArmTooLong { requested: f64, limit: f64 },

    #[error("degree {n} exceeds the supported maximum {max}")]
    DegreeTooLarge { n: usize, max: usize },

    #[error("quadrature did not converge: estimated error {achieved:.3e}, target {target:.3e}")]
    NonConvergence { achieved: f64, target: f64 },

    #[error("Gram matrix is not positive definite (leading minor {minor} of {size})")]
    IndefiniteGram { minor: usize, size: usize },

    #[error("needle decay check failed: observed constant {observed:.4} exceeds {limit:.4}")]
    DecayValidation { observed: f64, limit: f64 },

    #[error("needle preconditions violated: {0}")]
    Precondition(String),

    #[error("region contains no sample points")]
    EmptyRegion,

    #[error("domain file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::IndefiniteGram { .. }
                | Error::DecayValidation { .. }
        )
    }
}
