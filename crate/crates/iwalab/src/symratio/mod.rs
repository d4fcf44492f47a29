//! Formal ratio engine: both sides of the interpolation formulas are built
//! as rational functions in periods, Frobenius values, local constants and
//! opaque L-symbols, and their quotient is reduced by explicit rewrite rules.

mod build;
mod expr;

pub use build::*;
pub use expr::{Atom, Gross, LSym, Mono, Motive, Poly, SymExpr};

use thiserror::Error;

use crate::chargroup::GroupError;
use crate::grpring::GrpRingError;
use crate::reps::RepError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymError {
    #[error("vanishing factor: {0}")]
    Vanishing(String),
    #[error("Gamma has a pole at {0}")]
    Pole(i64),
    #[error("outside the admissible range: {0}")]
    Range(String),
    #[error("missing data: {0}")]
    Missing(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Measure(#[from] GrpRingError),
    #[error("arithmetic: {0}")]
    Arith(String),
}
