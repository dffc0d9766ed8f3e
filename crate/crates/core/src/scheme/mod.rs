//! One time step of the decoupled scheme: Cahn-Hilliard, momentum, pressure.
//!
//! The second-order scheme starts with one first-order step, after which the
//! level `n - 1` fields and auxiliary variables are available.

pub mod ch_step;
pub mod ns_step;
pub mod pressure_step;

pub use ch_step::{chemical_potential, e0_functional, step1, update_r, ChStepOutput};
pub use ns_step::{compute_j, nu_field, rho_field, step2, NsStepOutput};
pub use pressure_step::{step3_order1, step3_order2, PressureStepOutput};

use crate::error::{Error, Result};
use crate::field::{FaceField, ScalarField, ScalarKind};
use crate::grid::Grid;
use crate::linsolve::{SolveReport, SpectralSolver};
use crate::params::{Bdf, FluidParams, Order, SchemeConfig, Tolerances};
use crate::state::{History, SavState, SavValues, SimState};

/// Everything a sub-step reads: the state at level `n`, its history and the
/// BDF weights of the order in use for this step.
pub struct StepContext<'a> {
    pub grid: &'a Grid,
    pub params: &'a FluidParams,
    pub scheme: &'a SchemeConfig,
    pub state: &'a SimState,
    pub bdf: Bdf,
    pub dt: f64,
    pub tol: Tolerances,
}

impl<'a> StepContext<'a> {
    pub fn new(state: &'a SimState, params: &'a FluidParams, scheme: &'a SchemeConfig) -> Self {
        let order = effective_order(state, scheme);
        StepContext {
            grid: &state.grid,
            params,
            scheme,
            state,
            bdf: Bdf::for_order(order),
            dt: scheme.dt,
            tol: scheme.tol,
        }
    }

    pub fn order(&self) -> Order {
        if self.bdf.is_second() {
            Order::Second
        } else {
            Order::First
        }
    }

    /// Level `n - 1`, only when the step is second order.
    pub fn history(&self) -> Option<&'a History> {
        if self.bdf.is_second() {
            self.state.history.as_ref()
        } else {
            None
        }
    }

    fn combine(&self, xn: &ScalarField, xnm1: Option<&ScalarField>, a: f64, b: f64) -> ScalarField {
        match xnm1 {
            Some(x) => xn.lincomb(a, x, b),
            None => xn.scaled(a),
        }
    }

    pub fn phi_star(&self) -> ScalarField {
        let h = self.history().map(|h| &h.phi);
        self.combine(&self.state.phi, h, self.bdf.e_n, self.bdf.e_nm1)
            .with_kind(ScalarKind::Phi)
    }

    pub fn phi_hist(&self) -> ScalarField {
        let h = self.history().map(|h| &h.phi);
        self.combine(&self.state.phi, h, self.bdf.c_n, self.bdf.c_nm1)
    }

    pub fn mu_star(&self) -> ScalarField {
        let h = self.history().map(|h| &h.mu);
        self.combine(&self.state.mu, h, self.bdf.e_n, self.bdf.e_nm1)
            .with_kind(ScalarKind::Mu)
    }

    pub fn vel_star(&self) -> FaceField {
        match self.history() {
            Some(h) => self.state.vel.lincomb(self.bdf.e_n, &h.vel, self.bdf.e_nm1),
            None => self.state.vel.scaled(self.bdf.e_n),
        }
    }

    /// `(x^n, x^{n-1})` for one auxiliary variable; `x^{n-1}` is unused and
    /// reported as zero on first-order steps.
    pub fn sav_levels(&self, pick: impl Fn(&SavValues) -> f64) -> (f64, f64) {
        let xn = pick(&self.state.sav.current);
        let xnm1 = match (self.bdf.is_second(), self.state.sav.previous.as_ref()) {
            (true, Some(p)) => pick(p),
            _ => 0.0,
        };
        (xn, xnm1)
    }

    pub fn sav_star(&self) -> SavValues {
        let s = |pick: fn(&SavValues) -> f64| {
            let (a, b) = self.sav_levels(pick);
            self.bdf.star(a, b)
        };
        SavValues {
            chemical: s(|v| v.chemical),
            transport: s(|v| v.transport),
            convection: s(|v| v.convection),
            penalty: s(|v| v.penalty),
            kinetic: s(|v| v.kinetic),
        }
    }

    /// Pressure used in the momentum equation: `p^n + psi^n` (first order)
    /// or `p^n + (4 omega^n - omega^{n-1}) / 3` (second order).
    pub fn pressure_extrapolation(&self) -> ScalarField {
        let p = &self.state.p;
        match self.history() {
            Some(h) => p
                .lincomb(1.0, &self.state.increment, 4.0 / 3.0)
                .lincomb(1.0, &h.omega, -1.0 / 3.0),
            None => p.lincomb(1.0, &self.state.increment, 1.0),
        }
        .with_kind(ScalarKind::Pressure)
    }
}

/// The order a step from `state` actually uses: second-order steps need the
/// level `n - 1`, so the first step is always first order.
pub fn effective_order(state: &SimState, scheme: &SchemeConfig) -> Order {
    match (scheme.order, &state.history, &state.sav.previous) {
        (Order::Second, Some(_), Some(_)) => Order::Second,
        _ => Order::First,
    }
}

#[derive(Debug, Clone)]
pub struct StepStats {
    pub order_used: Order,
    pub ch: SolveReport,
    pub momentum: SolveReport,
    pub poisson: SolveReport,
}

/// Advances states on one grid; keeps the FFT plans between steps.
pub struct Stepper {
    pub params: FluidParams,
    pub scheme: SchemeConfig,
    spectral: SpectralSolver,
}

impl Stepper {
    pub fn new(grid: &Grid, params: FluidParams, scheme: SchemeConfig) -> Result<Self> {
        params.validate()?;
        Ok(Stepper {
            spectral: SpectralSolver::new(grid),
            params,
            scheme,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.spectral.grid()
    }

    pub fn advance(&self, state: &SimState) -> Result<(SimState, StepStats)> {
        if &state.grid != self.grid() {
            return Err(Error::InvalidGrid("state grid differs from stepper grid".into()));
        }
        let ctx = StepContext::new(state, &self.params, &self.scheme);
        let ch_spectral = if self.params.mobility.is_constant() {
            Some(&self.spectral)
        } else {
            None
        };
        let ch = step1(&ctx, ch_spectral)?;
        let ns = step2(&ctx, &ch)?;
        let pr = match ctx.order() {
            Order::First => step3_order1(&ctx, &self.spectral, &ns.vel_new)?,
            Order::Second => step3_order2(&ctx, &self.spectral, &ns.vel_new, &ns.nu_new)?,
        };

        let sav = SavValues {
            chemical: ch.r_new,
            transport: ns.q_new,
            convection: ns.r_conv_new,
            penalty: pr.t_new,
            kinetic: ns.k_new,
        };
        if !sav.is_finite() {
            return Err(Error::NonFinite("auxiliary variables"));
        }
        let keep = self.scheme.order == Order::Second;
        let next = SimState {
            grid: state.grid.clone(),
            phi: ch.phi_new,
            mu: ch.mu_new,
            p: pr.p_new,
            increment: pr.increment_new,
            vel: ns.vel_new,
            sav: SavState {
                current: sav,
                previous: keep.then_some(state.sav.current),
            },
            history: keep.then(|| History {
                phi: state.phi.clone(),
                mu: state.mu.clone(),
                vel: state.vel.clone(),
                omega: state.increment.clone(),
            }),
            time: state.time + self.scheme.dt,
            step_index: state.step_index + 1,
        };
        let stats = StepStats {
            order_used: ctx.order(),
            ch: ch.report,
            momentum: ns.report,
            poisson: pr.report,
        };
        Ok((next, stats))
    }
}

/// Single step without keeping a [`Stepper`].
pub fn advance(state: &SimState, params: &FluidParams, scheme: &SchemeConfig) -> Result<SimState> {
    Stepper::new(&state.grid, params.clone(), scheme.clone())?
        .advance(state)
        .map(|(s, _)| s)
}
