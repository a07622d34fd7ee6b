//! Nonlinear modular dynamical semigroups for finite-dimensional open quantum systems.
//!
//! Start from [`model::SystemModel`], evolve with [`dynamics`], and probe linear
//! response around equilibrium with [`linres`].

pub mod dissipator;
pub mod dynamics;
pub mod error;
pub mod linops;
pub mod linres;
pub mod config;
pub mod model;
pub mod quadrature;
pub mod random;
pub mod runner;

pub use error::{Error, Result};
pub use linops::{Operator, QuantumState, Superoperator};
