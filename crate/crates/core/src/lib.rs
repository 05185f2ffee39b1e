//! Numerical workbench for clustered vortex solutions of the semilinear
//! divergence-form problem
//!
//! ```text
//!   -delta^2 div(K(x) grad v) = (v - q)_+^p   in Omega,    v = 0 on dOmega,
//! ```
//!
//! built from the radial bubble profile up through Green's-function
//! asymptotics, multi-bubble ansatz assembly, reduced-energy maximization
//! over cluster centers, the full nonlinear solve, and 3D helical-tube
//! reconstruction for traveling-rotating vortices in an infinite cylinder.

pub mod ansatz;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod greens;
pub mod grid;
pub mod helix;
pub mod profile;
pub mod reduce;
pub mod solve;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
