//! Built-in initial conditions and parameter sets, and the time-marching
//! driver.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, ScalarKind};
use crate::grid::{BcSpec, Grid};
use crate::params::{FluidParams, Mobility, Order, SchemeConfig};
use crate::scheme::{chemical_potential, StepStats, Stepper};
use crate::state::SimState;

pub const AVAILABLE: [&str; 4] = ["accuracy_test", "bubble_case1", "bubble_case2", "rayleigh_taylor"];

/// Grid resolution and extent; the boundary kind is fixed by the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub grid: GridSpec,
    pub bc: BcSpec,
    pub params: FluidParams,
    pub order: Order,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between output records.
    pub cadence: usize,
}

impl Scenario {
    pub fn by_name(name: &str) -> Result<Scenario> {
        match name {
            "accuracy_test" => Ok(accuracy_test()),
            "bubble_case1" => Ok(bubble(1)),
            "bubble_case2" => Ok(bubble(2)),
            "rayleigh_taylor" => Ok(rayleigh_taylor()),
            _ => Err(Error::UnknownScenario {
                name: name.to_string(),
                available: AVAILABLE.join(", "),
            }),
        }
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly, self.bc)
    }

    pub fn scheme(&self) -> Result<SchemeConfig> {
        SchemeConfig::new(self.order, self.dt, &self.params)
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn initial_state(&self) -> Result<SimState> {
        let grid = self.build_grid()?;
        let phi = match self.name.as_str() {
            "accuracy_test" => accuracy_phi(&grid)?,
            "bubble_case1" | "bubble_case2" => bubble_phi(&grid, &self.params)?,
            "rayleigh_taylor" => rayleigh_taylor_phi(&grid, &self.params),
            other => {
                return Err(Error::UnknownScenario {
                    name: other.to_string(),
                    available: AVAILABLE.join(", "),
                })
            }
        };
        let mu = chemical_potential(&grid, &phi, &self.params)?;
        SimState::at_rest(grid, phi, mu)
    }
}

/// Diffuse-interface coefficient `lambda = 3 sigma / (2 sqrt 2)` for surface
/// tension `sigma`.
pub fn lambda_from_sigma(sigma: f64) -> f64 {
    3.0 / (2.0 * 2f64.sqrt()) * sigma
}

fn accuracy_test() -> Scenario {
    Scenario {
        name: "accuracy_test".into(),
        grid: GridSpec {
            nx: 128,
            ny: 128,
            lx: 2.0 * PI,
            ly: 2.0 * PI,
        },
        bc: BcSpec::PERIODIC,
        params: FluidParams {
            rho1: 10.0,
            rho2: 1.0,
            nu1: 1.0,
            nu2: 1.0,
            lambda: 0.01,
            epsilon: 0.08,
            s: 4.0,
            alpha: 1e-2,
            mobility: Mobility::Constant { m0: 1.0 },
            gravity: [0.0, 0.0],
        },
        order: Order::Second,
        dt: 1e-3,
        t_end: 0.64,
        cadence: 10,
    }
}

fn bubble(case: u8) -> Scenario {
    let (name, rho2, nu2, sigma, gamma, dt) = if case == 1 {
        ("bubble_case1", 100.0, 1.0, 24.5, 4e-5, 1e-4)
    } else {
        ("bubble_case2", 1.0, 0.1, 1.96, 2.6e-4, 5e-5)
    };
    Scenario {
        name: name.into(),
        grid: GridSpec {
            nx: 64,
            ny: 128,
            lx: 1.0,
            ly: 2.0,
        },
        bc: BcSpec::CHANNEL,
        params: FluidParams {
            rho1: 1000.0,
            rho2,
            nu1: 10.0,
            nu2,
            lambda: lambda_from_sigma(sigma),
            epsilon: 0.01,
            s: 4.0,
            alpha: 1e-5,
            mobility: Mobility::Degenerate { gamma },
            gravity: [0.0, -0.98],
        },
        order: Order::Second,
        dt,
        t_end: 3.0,
        cadence: 100,
    }
}

fn rayleigh_taylor() -> Scenario {
    Scenario {
        name: "rayleigh_taylor".into(),
        grid: GridSpec {
            nx: 128,
            ny: 512,
            lx: 1.0,
            ly: 4.0,
        },
        bc: BcSpec::CHANNEL,
        params: FluidParams {
            rho1: 3.0,
            rho2: 1.0,
            nu1: 0.0031316,
            nu2: 0.0031316,
            lambda: lambda_from_sigma(0.01),
            epsilon: 0.005,
            s: 4.0,
            alpha: 1e-5,
            mobility: Mobility::Degenerate { gamma: 4e-5 },
            gravity: [0.0, -9.80665],
        },
        order: Order::Second,
        dt: 1e-4,
        t_end: 1.5,
        cadence: 100,
    }
}

fn accuracy_phi(grid: &Grid) -> Result<ScalarField> {
    if !(grid.bc.x.is_periodic() && grid.bc.y.is_periodic()) {
        return Err(Error::InvalidGrid("accuracy test needs a periodic grid".into()));
    }
    let eps = 0.08;
    let bubbles = [(PI - 0.8, PI, 1.4), (PI + 1.7, PI, 0.5)];
    Ok(ScalarField::from_fn(grid, ScalarKind::Phi, |x, y| {
        1.0 + bubbles
            .iter()
            .map(|&(xi, yi, ri)| ((ri - ((x - xi).powi(2) + (y - yi).powi(2)).sqrt()) / (1.5 * eps)).tanh())
            .sum::<f64>()
    }))
}

/// Two overlapping-free bubbles on a periodic `[0, 2 pi]^2` grid, fluid at
/// rest.
pub fn init_accuracy_test(grid: &Grid) -> Result<SimState> {
    let phi = accuracy_phi(grid)?;
    let params = accuracy_test().params;
    let mu = chemical_potential(grid, &phi, &params)?;
    SimState::at_rest(grid.clone(), phi, mu)
}

fn check_channel(grid: &Grid) -> Result<()> {
    if grid.bc != BcSpec::CHANNEL {
        return Err(Error::InvalidGrid(
            "expected free-slip side walls and no-slip top and bottom".into(),
        ));
    }
    Ok(())
}

fn bubble_phi(grid: &Grid, params: &FluidParams) -> Result<ScalarField> {
    check_channel(grid)?;
    let eps = params.epsilon;
    Ok(ScalarField::from_fn(grid, ScalarKind::Phi, |x, y| {
        let r = ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
        ((r - 0.25) / (2f64.sqrt() * eps)).tanh()
    }))
}

/// Light circular bubble of radius 0.25 at `(0.5, 0.5)`, fluid at rest.
pub fn init_bubble(case: u8, grid: &Grid) -> Result<SimState> {
    if case != 1 && case != 2 {
        return Err(Error::InvalidParams(format!("bubble case must be 1 or 2, got {case}")));
    }
    let params = bubble(case).params;
    let phi = bubble_phi(grid, &params)?;
    let mu = chemical_potential(grid, &phi, &params)?;
    SimState::at_rest(grid.clone(), phi, mu)
}

/// Unperturbed height of the heavy-light interface, `y(x) = 2 + 0.1 cos(2 pi x)`.
pub fn rayleigh_taylor_interface(x: f64) -> f64 {
    2.0 + 0.1 * (2.0 * PI * x).cos()
}

fn rayleigh_taylor_phi(grid: &Grid, params: &FluidParams) -> ScalarField {
    let eps = params.epsilon;
    ScalarField::from_fn(grid, ScalarKind::Phi, |x, y| {
        ((y - rayleigh_taylor_interface(x)) / (2f64.sqrt() * eps)).tanh()
    })
}

/// Heavy fluid (`phi = 1`) above a cosine-perturbed interface, at rest.
pub fn init_rayleigh_taylor(grid: &Grid) -> Result<SimState> {
    check_channel(grid)?;
    let params = rayleigh_taylor().params;
    let phi = rayleigh_taylor_phi(grid, &params);
    let mu = chemical_potential(grid, &phi, &params)?;
    SimState::at_rest(grid.clone(), phi, mu)
}

/// Reynolds number `rho_H d^{3/2} g^{1/2} / mu_H` for domain width `d`.
pub fn rayleigh_taylor_reynolds(params: &FluidParams, d: f64) -> f64 {
    let g = params.gravity[1].abs();
    params.rho1 * d.powf(1.5) * g.sqrt() / params.nu1
}

/// Advances `state` by `n_steps` steps, calling `observe` on the initial
/// state and after every step.
pub fn march(
    stepper: &Stepper,
    mut state: SimState,
    n_steps: usize,
    mut observe: impl FnMut(&SimState, Option<&StepStats>) -> Result<()>,
) -> Result<SimState> {
    observe(&state, None)?;
    for _ in 0..n_steps {
        let (next, stats) = stepper.advance(&state)?;
        observe(&next, Some(&stats))?;
        state = next;
    }
    Ok(state)
}
