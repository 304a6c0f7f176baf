use thiserror::Error;

/// Every failure the library can report.
///
/// The variant name doubles as the stable error identifier printed by the
/// command line tool, see [`Error::name`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("PrimeMismatch: operands use primes {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("NotDivisible: {0}")]
    NotDivisible(String),
    #[error("PrecisionExhausted: {0}")]
    PrecisionExhausted(String),
    #[error("NotAUnit: {0}")]
    NotAUnit(String),
    #[error("InsufficientValues: need {needed}, got {got}")]
    InsufficientValues { needed: usize, got: usize },
    #[error("NotKummer: {0}")]
    NotKummer(String),
    #[error("DivisionByP: {0}")]
    DivisionByP(String),
    #[error("NonzeroConstant: f(0) does not vanish")]
    NonzeroConstant,
    #[error("InsufficientEntries: {0}")]
    InsufficientEntries(String),
    #[error("NotInWKS0: {0}")]
    NotInWKS0(String),
    #[error("NotInWKSd: {0}")]
    NotInWKSd(String),
    #[error("NoZeroModP: the reduced quadratic has no root mod {0}")]
    NoZeroModP(u64),
    #[error("DoubleRootModP: the reduced quadratic has the double root {root} mod {p}")]
    DoubleRootModP { p: u64, root: u64 },
    #[error("RelationViolated: {0}")]
    RelationViolated(String),
    #[error("UnsupportedCase: {0}")]
    UnsupportedCase(String),
    #[error("BackendOutOfRange: {0}")]
    BackendOutOfRange(String),
    #[error("NotPIntegral: {0}")]
    NotPIntegral(String),
    #[error("ParityMismatch: {0}")]
    ParityMismatch(String),
    #[error("DigitDepthExceeded: need {needed} digits, have {have}")]
    DigitDepthExceeded { needed: usize, have: usize },
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::PrimeMismatch(..) => "PrimeMismatch",
            Error::NotDivisible(_) => "NotDivisible",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NotAUnit(_) => "NotAUnit",
            Error::InsufficientValues { .. } => "InsufficientValues",
            Error::NotKummer(_) => "NotKummer",
            Error::DivisionByP(_) => "DivisionByP",
            Error::NonzeroConstant => "NonzeroConstant",
            Error::InsufficientEntries(_) => "InsufficientEntries",
            Error::NotInWKS0(_) => "NotInWKS0",
            Error::NotInWKSd(_) => "NotInWKSd",
            Error::NoZeroModP(_) => "NoZeroModP",
            Error::DoubleRootModP { .. } => "DoubleRootModP",
            Error::RelationViolated(_) => "RelationViolated",
            Error::UnsupportedCase(_) => "UnsupportedCase",
            Error::BackendOutOfRange(_) => "BackendOutOfRange",
            Error::NotPIntegral(_) => "NotPIntegral",
            Error::ParityMismatch(_) => "ParityMismatch",
            Error::DigitDepthExceeded { .. } => "DigitDepthExceeded",
        }
    }

    /// Errors that can only come from an arithmetic bug or a violated
    /// theorem, as opposed to bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::RelationViolated(_) | Error::NotKummer(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
