use thiserror::Error;

/// Errors raised by constructions, evaluations and verifications.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("overflow: {0}")]
    Overflow(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("image bound violated: {0}")]
    ImageBoundViolation(String),

    #[error("duplicate frequency: {0}")]
    DuplicateFrequency(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("signal too close to a node: {0}")]
    NearZeroSignal(String),

    #[error("finite-difference stencil overflow: {0}")]
    StencilOverflow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("spec error: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that stem from a violated precondition or hypothesis
    /// rather than from numerics.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::ImageBoundViolation(_)
                | Error::DuplicateFrequency(_)
                | Error::UnknownSymbol(_)
                | Error::HypothesisViolation(_)
                | Error::InvalidInput(_)
        )
    }

    /// The same error with `ctx` prepended to its message.
    pub fn context(self, ctx: impl std::fmt::Display) -> Error {
        let add = |m: String| format!("{ctx}: {m}");
        match self {
            Error::Overflow(m) => Error::Overflow(add(m)),
            Error::QuadratureNonConvergence(m) => Error::QuadratureNonConvergence(add(m)),
            Error::ImageBoundViolation(m) => Error::ImageBoundViolation(add(m)),
            Error::DuplicateFrequency(m) => Error::DuplicateFrequency(add(m)),
            Error::SingularSystem(m) => Error::SingularSystem(add(m)),
            Error::PrecisionExhausted(m) => Error::PrecisionExhausted(add(m)),
            Error::UnknownSymbol(m) => Error::UnknownSymbol(m),
            Error::HypothesisViolation(m) => Error::HypothesisViolation(add(m)),
            Error::NearZeroSignal(m) => Error::NearZeroSignal(add(m)),
            Error::StencilOverflow(m) => Error::StencilOverflow(add(m)),
            Error::InvalidInput(m) => Error::InvalidInput(add(m)),
            Error::Spec(m) => Error::Spec(add(m)),
        }
    }
}
