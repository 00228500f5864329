//! Decoherence channels on Ising chains as imaginary-time evolution in the
//! doubled Hilbert space, with Krylov complexity and Rényi-2 diagnostics.

pub mod cli;
pub mod dense;
pub mod doubled;
pub mod error;
pub mod evolve;
pub mod lanczos;
pub mod lintri;
pub mod logspace;
pub mod models;
pub mod oracle;
pub mod output;
pub mod scalar;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};

pub type Tridiagonal = lintri::TridiagonalOperator<f64>;
pub type Eigen = lintri::EigenDecomposition<f64>;
pub type Krylov = lintri::KrylovState<f64>;
pub type Lanczos = lanczos::LanczosResult<f64>;
