//! Ground-state preparation by repeated measurement of an interpolating
//! Hamiltonian, simulated with dense linear algebra.
//!
//! - [`hamiltonians`]: cost functions, `H_B`, `H_P` and the linear path.
//! - [`spectral`]: eigensystems, gap, fluctuation `Γ`, leakage and profiles.
//! - [`pointer`]: the digitized-pointer channel and ideal projective measurement.
//! - [`zeno`]: measurement schedules, runs and success bounds.
//! - [`grover`]: the unstructured-search instance and its symmetric subspace.
//! - [`config`] and [`experiment`]: the JSON-driven experiment runner behind the CLI.

pub mod config;
pub mod error;
pub mod experiment;
pub mod grover;
pub mod hamiltonians;
pub mod linalg;
pub mod pointer;
pub mod spectral;
pub mod zeno;

pub use error::{ConfigViolation, Error, Result};
