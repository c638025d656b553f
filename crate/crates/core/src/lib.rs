//! Affine L^p energies on uniform grids.

pub mod constants;
pub mod energy;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod quadrature;
pub mod solvers;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
