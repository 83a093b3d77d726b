use thiserror::Error;

/// Every failure the engine can report. The variant name is part of the
/// public contract: the CLI prints it verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("WindowCollapse: no known term survives below eps^{order}; increase the window")]
    WindowCollapse { order: i32 },
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("PrecisionUndecided: sign hidden inside the error bound; increase the precision")]
    PrecisionUndecided,
    #[error("UnlimitedHasNoStandardPart")]
    UnlimitedHasNoStandardPart,
    #[error("NonExactCoefficient: embedding needs exact rational coefficients")]
    NonExactCoefficient,
    #[error("SyntaxError at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("UnknownFunction: {0}")]
    UnknownFunction(String),
    #[error("UnboundVariable: {0}")]
    UnboundVariable(String),
    #[error("DomainError: {0}")]
    Domain(String),
    #[error("UnlimitedArgument: {0} needs a limited argument")]
    UnlimitedArgument(String),
    #[error("SignUndecidable at {0}")]
    SignUndecidable(String),
    #[error("NoSignChange: {0}")]
    NoSignChange(String),
    #[error("HypothesisViolation: {0}")]
    HypothesisViolation(String),
    #[error("QuadratureNonconvergent at n = {0}")]
    QuadratureNonconvergent(u64),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// The bare variant name, e.g. `"WindowCollapse"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::WindowCollapse { .. } => "WindowCollapse",
            Error::DivisionByZero => "DivisionByZero",
            Error::PrecisionUndecided => "PrecisionUndecided",
            Error::UnlimitedHasNoStandardPart => "UnlimitedHasNoStandardPart",
            Error::NonExactCoefficient => "NonExactCoefficient",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownFunction(_) => "UnknownFunction",
            Error::UnboundVariable(_) => "UnboundVariable",
            Error::Domain(_) => "DomainError",
            Error::UnlimitedArgument(_) => "UnlimitedArgument",
            Error::SignUndecidable(_) => "SignUndecidable",
            Error::NoSignChange(_) => "NoSignChange",
            Error::HypothesisViolation(_) => "HypothesisViolation",
            Error::QuadratureNonconvergent(_) => "QuadratureNonconvergent",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
