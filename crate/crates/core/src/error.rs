//! Crate-wide error type with stable, module-qualified codes.

use thiserror::Error;

/// Errors raised by library operations.
///
/// Every variant carries a stable code (see [`Error::code`]) so that callers
/// such as the CLI can map failures to documented exit classes without
/// string-matching messages.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("the zero series has no valuation")]
    ZeroHasNoValuation,
    #[error("element lies outside the valuation ring")]
    NotInValuationRing,
    #[error("no solution found in the searched class")]
    Unsolvable,
    #[error("conjugation by zero")]
    ZeroConjugate,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("element lies outside the coarse valuation ring")]
    NotInDotO,
    #[error("all coefficients vanish under specialization")]
    AllCoefficientsVanish,
    #[error("not a pseudo-cauchy prefix: {0}")]
    NotPseudoCauchy(String),
    #[error("empty witness pool")]
    EmptyPool,
    #[error("invalid convex level: {0}")]
    InvalidLevel(String),
    #[error("the derivation does not induce one on the specialization")]
    CoarseDerivationUndefined,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable module-qualified code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::RankMismatch(..) => "ordgroup/RankMismatch",
            Error::DivisionByZero => "residue/DivisionByZero",
            Error::InsufficientPrecision(_) => "series/InsufficientPrecision",
            Error::ZeroHasNoValuation => "series/ZeroHasNoValuation",
            Error::NotInValuationRing => "series/NotInValuationRing",
            Error::Unsolvable => "residue/Unsolvable",
            Error::ZeroConjugate => "diffpoly/ZeroConjugate",
            Error::ZeroPolynomial => "diffpoly/ZeroPolynomial",
            Error::NotInDotO => "coarsen/NotInDotO",
            Error::AllCoefficientsVanish => "coarsen/AllCoefficientsVanish",
            Error::NotPseudoCauchy(_) => "cuts/NotPseudoCauchy",
            Error::EmptyPool => "oracle/EmptyPool",
            Error::InvalidLevel(_) => "ordgroup/InvalidLevel",
            Error::CoarseDerivationUndefined => "coarsen/CoarseDerivationUndefined",
            Error::PreconditionViolated(_) => "dhensel/PreconditionViolated",
            Error::Parse(_) => "cli/Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
