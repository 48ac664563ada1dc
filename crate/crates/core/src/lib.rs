#![no_std]
//! Carlitz calculus over F_q((x)): truncated Laurent series, Carlitz
//! polynomials, difference/differential operators and their equations.

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod field;
pub mod series;
pub mod artin;
pub mod linear;
pub mod carlitz;
pub mod hyperdiff;
pub mod operators;
pub mod matrix;
pub mod ode;
pub mod special;
pub mod umbral;
pub mod weyl;

pub use error::{Error, Result};
pub use field::{Context, Fe, Params};
pub use series::{Series, Valuation};
