//! Rational q-series, Eisenstein combinations and Hauptmoduln for building
//! rational approximations to `zeta(3)` from modular forms of small level.

pub mod arith;
pub mod error;
pub mod families;
pub mod linform;
pub mod modforms;
pub mod numerics;
pub mod qseries;
pub mod recurrences;

pub use error::{Error, Result};
