//! Exact number backend: cyclotomic field elements and matrices over them.

mod cyclo;
mod matrix;

pub use cyclo::{euler_phi, Cyclotomic, CycloError, MAX_ORDER};
pub use matrix::{rank, ExactMatrix, MatrixError};
