//! Resource estimation and gate-level verification for qubitized simulation
//! of electronic-structure Hamiltonians.

pub mod circuit;
pub mod costing;
pub mod error;
pub mod factorization;
pub mod integrals;
pub mod kernels;
pub mod math;
pub mod simulator;
pub mod sparsity;
pub mod verify;

pub use error::{Error, Result};
