//! Potentials, thermodynamic state, units and grids shared by every other module.

pub mod grid;
pub mod potential;
pub mod thermo;
pub mod units;

pub use grid::{auto_grid, plan_grid, Grid, GridPlan};
pub use potential::{oh_spectroscopy, Derivatives, MorseSpectroscopy, Potential};
pub use thermo::ThermoState;
pub use units::UnitTable;
