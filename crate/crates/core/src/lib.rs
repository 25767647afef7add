//! Spectral simulation of small-data Schrödinger equations with a
//! dissipative power nonlinearity, and the tooling to measure and check
//! their lifespan.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod integrator;
pub mod lifespan;
pub mod persist;
pub mod profile_ode;
pub mod propagators;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
