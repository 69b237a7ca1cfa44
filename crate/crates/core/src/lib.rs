//! Quantum effective classical potentials for one-dimensional systems.
//!
//! Units are atomic throughout (hbar = 1 unless a [`model::ThermoState`] says
//! otherwise). Every method produces a normalized position density on a grid
//! so that results can be compared against the exact thermal density.

pub mod acceptance;
pub mod effective;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod smearing;
pub mod stats;

pub use error::{Error, Result};
