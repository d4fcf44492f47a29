//! Exact verification tools for p-adic measures on CM Iwasawa towers.

pub mod arith;
pub mod chargroup;
pub mod cmlattice;
pub mod descent;
pub mod epsilon;
pub mod grpring;
pub mod nt;
pub mod reps;
pub mod symratio;
pub mod tower;
