//! Alternating minimization over randomly altered Hamiltonians.
//!
//! The crate is organised bottom-up:
//!
//! * [`qop`]: qudit registers, local and dense operators, spectral decomposition, states.
//! * [`models`]: Max-Cut, quantum Max-Cut, AKLT, Grover and energy-well landscapes.
//! * [`altered`]: the local (rank-one projector) and sparse (gaussian `W†W`) altered families.
//! * [`stats`]: quartile statistic, spectral profiles, variance.
//! * [`lowering`]: best-of-K energy measurement and the signed-Pauli variational update.
//! * [`altmin`]: measurement and variational drivers.
//! * [`theory`]: closed-form expected variances and their Monte Carlo checks.
//! * [`anneal`]: simulated-annealing baseline on diagonal landscapes.
//!
//! Basis convention: site 0 is the most significant digit of the mixed-radix index.

pub mod altered;
pub mod altmin;
pub mod anneal;
mod error;
pub mod lowering;
pub mod models;
pub mod qop;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
