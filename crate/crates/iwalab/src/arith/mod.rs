//! Exact cyclotomic numbers, truncated p-adic numbers and imaginary quadratic
//! field elements, plus the [`Ring`] interface shared by coefficient rings.

mod cyclo;
mod padic;
mod quad;
mod ring;

pub use cyclo::{CycloAccumulator, CycloNumber, MAX_CONDUCTOR};
pub use padic::{padic_sqrt, teichmuller, PadicExt, PadicNumber, PrimeChoice, DEFAULT_PRECISION};
pub use quad::{QuadFieldElem, DISCRIMINANTS};
pub use ring::{rat, Ring};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor {0} exceeds the configured bound {MAX_CONDUCTOR}")]
    ConductorOverflow(u64),
    #[error("p-adic operands live in different extensions: {0} vs {1}")]
    ExtensionMismatch(String, String),
    #[error("{0} is not a unit at this precision")]
    NotAUnit(String),
    #[error("residue {0} is zero mod {1}")]
    ZeroResidue(i64, u64),
    #[error("{0} is not a square residue mod {1}")]
    NonResidue(i64, u64),
    #[error("{0} is not p-integral for p = {1}")]
    NotIntegral(String, u64),
    #[error("unsupported extension: {0}")]
    Unsupported(String),
    #[error("precision p^N = {p}^{n} exceeds the 63-bit working modulus")]
    PrecisionOverflow { p: u64, n: u32 },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("discriminant {0} is not one of 3, 4, 7, 8, 11, 19, 43, 67, 163")]
    BadDiscriminant(u64),
}
