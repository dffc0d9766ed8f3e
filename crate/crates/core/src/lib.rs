//! Decoupled, energy-stable time stepping for the Cahn-Hilliard-Navier-Stokes
//! model of two immiscible fluids with variable density and viscosity, on a
//! two-dimensional staggered finite-difference grid.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod linsolve;
pub mod ops;
pub mod params;
pub mod scenarios;
pub mod scheme;
pub mod state;
pub mod validation;

pub use error::{Error, Result};
pub use field::{FaceField, FaceKind, ScalarField, ScalarKind};
pub use grid::{BcSpec, Boundary, Grid, WallKind};
pub use params::{Bdf, FluidParams, Mobility, Order, SchemeConfig, Tolerances};
pub use state::{SavState, SavValues, SimState};
