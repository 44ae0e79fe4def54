//! Entanglement witnesses for symmetric two-qudit states built from
//! copositive matrices.

pub mod certify;
pub mod cone;
pub mod error;
pub mod matrix;
pub mod symmetric;
pub mod witness;

pub use error::{Error, Result};
pub use matrix::{HermitianMatrix, RealSymMatrix, C64};
