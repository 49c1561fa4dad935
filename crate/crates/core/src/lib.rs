//! Degree and exponential-degree filtrations of rational modules for `G_a`
//! and the unitriangular groups `U_N` over a prime field.

pub mod comodule;
pub mod error;
pub mod exponential;
pub mod field;
pub mod io;
pub mod ga;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod support;
pub mod unipotent;
pub mod verify;

pub use error::{Error, Result};
pub use field::{PrimeField, Scalar};
