//! Quick invariant checks on tiny grids, used by `chns validate`.

use std::f64::consts::PI;

use crate::diagnostics::modified_energy;
use crate::error::Result;
use crate::field::{FaceField, FaceKind, ScalarField, ScalarKind};
use crate::grid::{BcSpec, Grid};
use crate::linsolve::SpectralSolver;
use crate::ops;
use crate::params::{FluidParams, Order, SchemeConfig};
use crate::scenarios::{init_accuracy_test, Scenario};
use crate::scheme::{chemical_potential, Stepper};
use crate::state::SimState;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, value: f64, limit: f64) -> Check {
    Check {
        name: name.to_string(),
        passed: value.is_finite() && value <= limit,
        detail: format!("{value:.3e} (limit {limit:.1e})"),
    }
}

/// Deterministic rough test data.
fn scalar(g: &Grid, seed: f64) -> ScalarField {
    let mut f = ScalarField::zeros(g, ScalarKind::Generic);
    for (k, v) in f.data.iter_mut().enumerate() {
        *v = ((k as f64 + seed) * 12.9898).sin() * 43758.5453 % 1.0;
    }
    f
}

fn faces(g: &Grid, seed: f64) -> FaceField {
    let mut f = FaceField::zeros(g, FaceKind::Velocity);
    for (k, v) in f.u.iter_mut().chain(f.v.iter_mut()).enumerate() {
        *v = ((k as f64 + seed) * 78.233).sin() * 12345.678 % 1.0;
    }
    f.apply_wall_bc(g);
    f
}

fn operator_checks(g: &Grid, tag: &str) -> Result<Vec<Check>> {
    let f = scalar(g, 0.3);
    let mu = scalar(g, 7.1);
    let rho = scalar(g, 2.2).map(|v| 2.0 + v);
    let nu = scalar(g, 5.5).map(|v| 1.5 + v);
    let u = faces(g, 1.7);
    let w = faces(g, 3.9);
    let scale = |a: f64, b: f64| a.abs().max(b.abs()).max(1.0);

    let lhs = ops::inner_faces(g, &ops::gradient(g, &f)?, &u);
    let rhs = -ops::inner_cells(g, &f, &ops::divergence(g, &u)?);
    let conv = ops::inner_faces(g, &ops::convection_momentum(g, &rho, &w, &u)?, &u);
    let flux = ops::inner_faces(g, &ops::flux_gradient_terms(g, &w, &u)?, &u);
    let zec = ops::inner_cells(g, &ops::advect_scalar(g, &u, &f)?, &mu)
        + ops::inner_faces(g, &ops::capillary_force(g, &f, &mu)?, &u);
    let diss = ops::strain_dissipation(g, &nu, &u)?;
    let sd = -ops::inner_faces(g, &ops::strain_divergence(g, &nu, &u)?, &u);
    let (x, rep) = SpectralSolver::new(g).poisson(&f)?;
    Ok(vec![
        check(&format!("{tag}: <grad f, u> + <f, div u>"), (lhs - rhs).abs() / scale(lhs, rhs), 1e-12),
        check(&format!("{tag}: convection skew-symmetry"), conv.abs(), 1e-12),
        check(&format!("{tag}: flux-term skew-symmetry"), flux.abs(), 1e-12),
        check(&format!("{tag}: transport/capillary cancellation"), zec.abs(), 1e-12),
        check(&format!("{tag}: strain dissipation identity"), (diss - sd).abs() / scale(diss, sd), 1e-12),
        check(&format!("{tag}: poisson residual"), rep.final_residual + x.mean().abs(), 1e-11),
    ])
}

fn run_checks(state: SimState, params: &FluidParams, order: Order, dt: f64, steps: usize) -> Result<Vec<Check>> {
    let scheme = SchemeConfig::new(order, dt, params)?;
    let stepper = Stepper::new(&state.grid, params.clone(), scheme)?;
    let v0 = ops::integrate(&state.grid, &state.phi);
    let mut s = state;
    let mut worst_rise: f64 = f64::NEG_INFINITY;
    let mut drift: f64 = 0.0;
    for _ in 0..steps {
        let (next, stats) = stepper.advance(&s)?;
        let before = modified_energy(&s, params, dt, stats.order_used)?.modified;
        let after = modified_energy(&next, params, dt, stats.order_used)?.modified;
        worst_rise = worst_rise.max((after - before) / before.abs());
        drift = drift.max((ops::integrate(&next.grid, &next.phi) - v0).abs() / v0.abs().max(1.0));
        s = next;
    }
    let o = order.as_u8();
    Ok(vec![
        check(&format!("order {o}: modified energy non-increasing (relative rise)"), worst_rise, 1e-10),
        check(&format!("order {o}: volume drift"), drift, 1e-12),
    ])
}

fn rest_state_check(g: &Grid, params: &FluidParams) -> Result<Check> {
    let phi = ScalarField::constant(g, ScalarKind::Phi, 1.0);
    let mu = chemical_potential(g, &phi, params)?;
    let s0 = SimState::at_rest(g.clone(), phi, mu)?;
    let scheme = SchemeConfig::new(Order::Second, 1e-2, params)?;
    let stepper = Stepper::new(g, params.clone(), scheme)?;
    let (s1, _) = stepper.advance(&s0)?;
    let (s2, _) = stepper.advance(&s1)?;
    let change = s2.phi.lincomb(1.0, &s0.phi, -1.0).max_abs()
        + s2.vel.max_abs()
        + s2.p.max_abs()
        + s2.sav.current.max_deviation_from_one();
    Ok(check("rest state is a fixed point", change, 1e-12))
}

pub fn run_all(n: usize) -> Result<Vec<Check>> {
    let periodic = Grid::new(n, n, 2.0 * PI, 2.0 * PI, BcSpec::PERIODIC)?;
    let channel = Grid::new(n, 2 * n, 1.0, 2.0, BcSpec::CHANNEL)?;
    let mut out = operator_checks(&periodic, "periodic")?;
    out.extend(operator_checks(&channel, "channel")?);
    let params = Scenario::by_name("accuracy_test")?.params;
    for order in [Order::First, Order::Second] {
        out.extend(run_checks(init_accuracy_test(&periodic)?, &params, order, 1e-2, 6)?);
    }
    out.push(rest_state_check(&channel, &params)?);
    Ok(out)
}
