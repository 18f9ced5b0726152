//! Statevector emulation and variational circuit synthesis.
//!
//! The numerics are generic over a [`Real`] scalar; the `*64` aliases below
//! fix it to `f64`, which is what the tools and tests use.

pub mod circuit;
pub mod error;
pub mod fermion;
pub mod linalg;
pub mod optimizer;
pub mod pauli;
pub mod scalar;
pub mod search;
pub mod state;
pub mod tasks;
pub mod trotter;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Circuit64 = circuit::Circuit<f64>;
pub type PauliSum64 = pauli::PauliSum<f64>;
pub type Statevector64 = state::Statevector<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
