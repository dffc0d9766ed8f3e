//! Simulation state: fields at the current level, the previous level needed by
//! the second-order scheme, and the five scalar auxiliary variables.

use crate::error::{Error, Result};
use crate::field::{FaceField, FaceKind, ScalarField, ScalarKind};
use crate::grid::Grid;

/// The five scalar auxiliary variables. Each has exact value 1.
///
/// `chemical` is `r`, `transport` is `Q`, `convection` is `R`, `penalty` is
/// `T` and `kinetic` is `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SavValues {
    pub chemical: f64,
    pub transport: f64,
    pub convection: f64,
    pub penalty: f64,
    pub kinetic: f64,
}

impl SavValues {
    pub const NAMES: [&'static str; 5] = ["r", "Q", "R", "T", "K"];

    pub const ONE: SavValues = SavValues {
        chemical: 1.0,
        transport: 1.0,
        convection: 1.0,
        penalty: 1.0,
        kinetic: 1.0,
    };

    pub fn as_array(&self) -> [f64; 5] {
        [
            self.chemical,
            self.transport,
            self.convection,
            self.penalty,
            self.kinetic,
        ]
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn max_deviation_from_one(&self) -> f64 {
        self.as_array()
            .iter()
            .fold(0.0_f64, |m, x| m.max((x - 1.0).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|x| x.is_finite())
    }
}

impl Default for SavValues {
    fn default() -> Self {
        SavValues::ONE
    }
}

/// Auxiliary variables at level `n` and, once a step has been taken, `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SavState {
    pub current: SavValues,
    pub previous: Option<SavValues>,
}

impl SavState {
    pub fn initial() -> Self {
        SavState {
            current: SavValues::ONE,
            previous: None,
        }
    }
}

/// Fields at level `n - 1`, kept only by the second-order scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub phi: ScalarField,
    pub mu: ScalarField,
    pub vel: FaceField,
    /// Rotational pressure increment at level `n - 1`.
    pub omega: ScalarField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub grid: Grid,
    pub phi: ScalarField,
    pub mu: ScalarField,
    pub p: ScalarField,
    /// Latest pressure increment: `psi` for the first-order scheme, `omega`
    /// for the second-order one.
    pub increment: ScalarField,
    pub vel: FaceField,
    pub sav: SavState,
    pub history: Option<History>,
    pub time: f64,
    pub step_index: usize,
}

impl SimState {
    /// State at `t = 0` with zero pressure and unit auxiliary variables.
    ///
    /// `mu` is the chemical potential consistent with `phi`, which the first
    /// step needs for the capillary force.
    pub fn new(grid: Grid, phi: ScalarField, vel: FaceField, mu: ScalarField) -> Result<Self> {
        phi.check(&grid)?;
        mu.check(&grid)?;
        vel.check(&grid)?;
        if !phi.is_finite() || !mu.is_finite() || !vel.is_finite() {
            return Err(Error::NonFinite("initial state"));
        }
        let mut vel = vel;
        vel.apply_wall_bc(&grid);
        Ok(SimState {
            p: ScalarField::zeros(&grid, ScalarKind::Pressure),
            increment: ScalarField::zeros(&grid, ScalarKind::Omega),
            phi: phi.with_kind(ScalarKind::Phi),
            mu: mu.with_kind(ScalarKind::Mu),
            vel,
            sav: SavState::initial(),
            history: None,
            time: 0.0,
            step_index: 0,
            grid,
        })
    }

    /// Quiescent state with `u = 0`.
    pub fn at_rest(grid: Grid, phi: ScalarField, mu: ScalarField) -> Result<Self> {
        let vel = FaceField::zeros(&grid, FaceKind::Velocity);
        Self::new(grid, phi, vel, mu)
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite()
            && self.mu.is_finite()
            && self.p.is_finite()
            && self.vel.is_finite()
            && self.sav.current.is_finite()
    }
}
