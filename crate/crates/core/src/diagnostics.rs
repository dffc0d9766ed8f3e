//! Energies, conservation monitors, benchmark quantities and error norms.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::field::{FaceField, ScalarField};
use crate::grid::Grid;
use crate::ops;
use crate::params::{big_f_well, FluidParams, Order, SchemeConfig};
use crate::scheme::{e0_functional, effective_order, rho_field};
use crate::state::{SavValues, SimState};

/// Terms of the discrete modified energy. `modified` is their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub time: f64,
    pub order: Order,
    pub original: f64,
    pub modified: f64,
    pub kinetic: f64,
    /// `lambda eps` gradient part.
    pub gradient: f64,
    /// Stabilisation part plus the `E0` combination.
    pub potential: f64,
    pub pressure: f64,
    pub sav: f64,
}

impl EnergyReport {
    /// Modified energy with the constant contributed by unit auxiliary
    /// variables removed.
    pub fn sav_subtracted(&self, params: &FluidParams) -> f64 {
        self.modified - 5.0 / params.alpha
    }
}

/// `int rho_f |u|^2` with densities averaged to faces.
pub fn mass_weighted_kinetic(grid: &Grid, phi: &ScalarField, vel: &FaceField, params: &FluidParams) -> Result<f64> {
    let rho_f = ops::face_average(grid, &rho_field(phi, params))?;
    Ok(ops::weighted_inner_faces(grid, &rho_f, vel, vel))
}

/// `int (rho |u|^2 / 2 + lambda eps |grad phi|^2 / 2 + lambda F(phi) / eps)`
/// minus the accumulated gravity work.
pub fn original_energy(state: &SimState, params: &FluidParams, gravity_work: f64) -> Result<f64> {
    let g = &state.grid;
    let kin = 0.5 * mass_weighted_kinetic(g, &state.phi, &state.vel, params)?;
    let grad = 0.5 * params.lambda * params.epsilon * ops::norm_sq_faces(g, &ops::gradient(g, &state.phi)?);
    let bulk: f64 = state.phi.data.iter().map(|&p| big_f_well(p)).sum::<f64>() * g.cell_area();
    Ok(kin + grad + params.lambda / params.epsilon * bulk - gravity_work)
}

/// Rate of work of gravity, `int rho g . u`.
pub fn gravity_power(state: &SimState, params: &FluidParams) -> Result<f64> {
    let g = &state.grid;
    let rho_f = ops::face_average(g, &rho_field(&state.phi, params))?;
    let su: f64 = rho_f.u.iter().zip(&state.vel.u).map(|(r, u)| r * u).sum();
    let sv: f64 = rho_f.v.iter().zip(&state.vel.v).map(|(r, v)| r * v).sum();
    Ok((params.gravity[0] * su + params.gravity[1] * sv) * g.cell_area())
}

/// Time integral of the gravity power by the trapezoidal rule.
#[derive(Debug, Clone, Default)]
pub struct GravityWork {
    pub work: f64,
    last_power: Option<f64>,
}

impl GravityWork {
    pub fn new(initial: &SimState, params: &FluidParams) -> Result<Self> {
        Ok(GravityWork {
            work: 0.0,
            last_power: Some(gravity_power(initial, params)?),
        })
    }

    pub fn record(&mut self, state: &SimState, params: &FluidParams, dt: f64) -> Result<f64> {
        let p = gravity_power(state, params)?;
        if let Some(prev) = self.last_power {
            self.work += 0.5 * dt * (prev + p);
        }
        self.last_power = Some(p);
        Ok(self.work)
    }
}

/// Discrete modified energy in the form that the step of the given order
/// dissipates. The second-order form needs the level `n - 1`.
pub fn modified_energy(
    state: &SimState,
    params: &FluidParams,
    dt: f64,
    order: Order,
) -> Result<EnergyReport> {
    let g = &state.grid;
    let (l, e, s, a) = (params.lambda, params.epsilon, params.s, params.alpha);
    let chi = params.chi();
    let gphi = ops::gradient(g, &state.phi)?;
    let gp = ops::norm_sq_faces(g, &ops::gradient(g, &state.p)?);
    let kin_new = mass_weighted_kinetic(g, &state.phi, &state.vel, params)?;
    let e0_new = e0_functional(g, &state.phi, params);
    let x_new = state.sav.current.sum();
    let (kinetic, gradient, potential, pressure, sav) = match order {
        Order::First => (
            0.5 * kin_new,
            0.5 * l * e * ops::norm_sq_faces(g, &gphi),
            0.5 * l * s / e * ops::norm_sq_cells(g, &state.phi) + e0_new,
            dt * dt / chi * gp,
            x_new / a,
        ),
        Order::Second => {
            let h = state.history.as_ref().ok_or(Error::MissingHistory("modified energy"))?;
            let prev: SavValues = state.sav.previous.ok_or(Error::MissingHistory("modified energy"))?;
            let kin_old = mass_weighted_kinetic(g, &h.phi, &h.vel, params)?;
            let gphi_old = ops::gradient(g, &h.phi)?;
            let gext = gphi.lincomb(2.0, &gphi_old, -1.0);
            let pext = state.phi.lincomb(2.0, &h.phi, -1.0);
            (
                0.5 * (1.5 * kin_new - 0.5 * kin_old),
                0.25 * l * e * (ops::norm_sq_faces(g, &gphi) + ops::norm_sq_faces(g, &gext)),
                0.25 * l * s / e * (ops::norm_sq_cells(g, &state.phi) + ops::norm_sq_cells(g, &pext))
                    + 0.5 * (3.0 * e0_new - e0_functional(g, &h.phi, params)),
                dt * dt / (3.0 * chi) * gp,
                (3.0 * x_new - prev.sum()) / (2.0 * a),
            )
        }
    };
    Ok(EnergyReport {
        time: state.time,
        order,
        original: original_energy(state, params, 0.0)?,
        modified: kinetic + gradient + potential + pressure + sav,
        kinetic,
        gradient,
        potential,
        pressure,
        sav,
    })
}

/// Modified energy in the form matching the next step the scheme would take
/// from `state`.
pub fn discrete_modified_energy(state: &SimState, params: &FluidParams, scheme: &SchemeConfig) -> Result<EnergyReport> {
    modified_energy(state, params, scheme.dt, effective_order(state, scheme))
}

/// Centre of mass, rise velocity and volume of the region `phi < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleMetrics {
    /// `None` when no cell has `phi < 0`.
    pub y_c: Option<f64>,
    pub v_c: Option<f64>,
    pub volume: f64,
}

pub fn bubble_metrics(state: &SimState) -> Result<BubbleMetrics> {
    let g = &state.grid;
    let (_, vc) = ops::velocity_at_centres(g, &state.vel)?;
    let (mut n, mut ys, mut vs) = (0usize, 0.0, 0.0);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.cell(i, j);
            if state.phi.data[k] < 0.0 {
                n += 1;
                ys += g.yc(j);
                vs += vc.data[k];
            }
        }
    }
    let volume = ops::integrate(g, &state.phi);
    if n == 0 {
        return Ok(BubbleMetrics {
            y_c: None,
            v_c: None,
            volume,
        });
    }
    Ok(BubbleMetrics {
        y_c: Some(ys / n as f64),
        v_c: Some(vs / n as f64),
        volume,
    })
}

/// Number of 4-connected components of the cells where `inside` holds,
/// wrapping across periodic edges.
pub fn count_components(grid: &Grid, field: &ScalarField, inside: impl Fn(f64) -> bool) -> usize {
    let n = grid.n_cells();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] || !inside(field.data[start]) {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % grid.nx, k / grid.nx);
            for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
                let Some(ni) = step(i, di, grid.nx, grid.bc.x.is_periodic()) else {
                    continue;
                };
                let Some(nj) = step(j, dj, grid.ny, grid.bc.y.is_periodic()) else {
                    continue;
                };
                let nk = grid.cell(ni, nj);
                if !seen[nk] && inside(field.data[nk]) {
                    seen[nk] = true;
                    queue.push_back(nk);
                }
            }
        }
    }
    count
}

fn step(i: usize, d: isize, n: usize, periodic: bool) -> Option<usize> {
    let m = i as isize + d;
    if (0..n as isize).contains(&m) {
        Some(m as usize)
    } else if periodic {
        Some(m.rem_euclid(n as isize) as usize)
    } else {
        None
    }
}

/// Lowest height at which `phi` changes sign from negative (below) to
/// non-negative (above), minimised over columns. Linear interpolation
/// between cell centres; `None` if no column has a crossing.
pub fn min_interface_height(grid: &Grid, phi: &ScalarField) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..grid.nx {
        for j in 1..grid.ny {
            let (a, b) = (phi.at(i, j - 1), phi.at(i, j));
            if a < 0.0 && b >= 0.0 {
                let t = a / (a - b);
                let y = grid.yc(j - 1) + t * grid.hy;
                best = Some(best.map_or(y, |m| m.min(y)));
                break;
            }
        }
    }
    best
}

/// `sqrt(int (f - f_ref)^2)` over cells.
pub fn l2_error(grid: &Grid, f: &ScalarField, f_ref: &ScalarField) -> Result<f64> {
    f.check(grid)?;
    f_ref.check(grid)?;
    let d = f.lincomb(1.0, f_ref, -1.0);
    Ok(ops::norm_sq_cells(grid, &d).sqrt())
}

/// Same norm after removing each field's mean, for quantities defined up to
/// a constant.
pub fn l2_error_mean_free(grid: &Grid, f: &ScalarField, f_ref: &ScalarField) -> Result<f64> {
    let a = f.map(|v| v - f.mean());
    let b = f_ref.map(|v| v - f_ref.mean());
    l2_error(grid, &a, &b)
}

/// Discrete L2 norms of the errors of both velocity components, on faces.
pub fn l2_error_faces(grid: &Grid, f: &FaceField, f_ref: &FaceField) -> Result<(f64, f64)> {
    f.check(grid)?;
    f_ref.check(grid)?;
    let h = grid.cell_area();
    let eu: f64 = f.u.iter().zip(&f_ref.u).map(|(a, b)| (a - b) * (a - b)).sum();
    let ev: f64 = f.v.iter().zip(&f_ref.v).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(((eu * h).sqrt(), (ev * h).sqrt()))
}

/// Least-squares slope of `log(error)` against `log(dt)`.
pub fn convergence_slope(errors: &[f64], dts: &[f64]) -> Result<f64> {
    if errors.len() != dts.len() {
        return Err(Error::DimensionMismatch {
            expected: (dts.len(), 1),
            found: (errors.len(), 1),
        });
    }
    if errors.len() < 2 {
        return Err(Error::InvalidParams("slope needs at least two samples".into()));
    }
    if errors.iter().chain(dts).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParams("errors and steps must be positive".into()));
    }
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("time steps must not all be equal".into()));
    }
    Ok(sxy / sxx)
}
