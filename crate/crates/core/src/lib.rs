//! Spectral laboratory for ground states of fractional Henon systems.
//!
//! The domain is the interval (-1, 1) with the exact Dirichlet sine
//! eigenbasis, so the spectral fractional Laplacian is diagonal and free of
//! operator discretization error. On top of it sit the weighted Rayleigh
//! quotients of the Henon system, a projected-gradient ground-state solver
//! with Lagrange rescaling, the modal harmonic extension to the
//! half-cylinder, the critical bubble family, and the exponent sweeps that
//! probe boundary concentration as p + q approaches the critical trace
//! exponent 2N/(N - 2s).

pub mod asymptotics;
pub mod basis;
pub mod bubbles;
pub mod config;
pub mod energy;
pub mod error;
pub mod extension;
pub mod field;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use basis::{make_basis, BasisSpec};
pub use config::ProblemConfig;
pub use energy::{cpq, ExponentConfig};
pub use error::{Error, Result};
pub use field::SpectralField;
pub use solver::{GroundState, SolverOptions};
