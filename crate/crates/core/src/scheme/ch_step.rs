//! Step 1: the linear Cahn-Hilliard system and the `r` update.

use super::StepContext;
use crate::error::{Error, Result};
use crate::field::{ScalarField, ScalarKind};
use crate::grid::Grid;
use crate::linsolve::{build_ch_operator, SolveReport, SpectralSolver};
use crate::ops;
use crate::params::{big_f_well, f_well, mobility_of_phi, Bdf, FluidParams};

#[derive(Debug, Clone)]
pub struct ChStepOutput {
    pub phi_new: ScalarField,
    pub mu_new: ScalarField,
    pub r_new: f64,
    /// `<advect(u*, phi*), mu^{n+1}>`, the half of the `Q` integrand known
    /// before the momentum solve.
    pub q_integrand_part1: f64,
    pub report: SolveReport,
}

/// `(lambda / eps) int (F(phi) - s phi^2 / 2)`.
pub fn e0_functional(grid: &Grid, phi: &ScalarField, params: &FluidParams) -> f64 {
    let s = params.s;
    let sum: f64 = phi
        .data
        .iter()
        .map(|&p| big_f_well(p) - 0.5 * s * p * p)
        .sum();
    params.lambda / params.epsilon * sum * grid.cell_area()
}

/// Chemical potential consistent with `phi`,
/// `lambda (-eps lap phi + f(phi) / eps)`.
pub fn chemical_potential(grid: &Grid, phi: &ScalarField, params: &FluidParams) -> Result<ScalarField> {
    let lap = ops::laplacian(grid, phi)?;
    let (l, e) = (params.lambda, params.epsilon);
    let data = lap
        .data
        .iter()
        .zip(&phi.data)
        .map(|(d, &p)| l * (-e * d + f_well(p) / e))
        .collect();
    ScalarField::from_vec(grid, ScalarKind::Mu, data)
}

/// Explicit nonlinear term `f(phi*) - s phi*`.
pub(crate) fn split_nonlinearity(phi_star: &ScalarField, s: f64) -> ScalarField {
    phi_star.map(|p| f_well(p) - s * p)
}

pub fn step1(ctx: &StepContext, spectral: Option<&SpectralSolver>) -> Result<ChStepOutput> {
    let g = ctx.grid;
    let p = ctx.params;
    let bdf = ctx.bdf;
    let dt = ctx.dt;

    let phi_star = ctx.phi_star();
    let phi_hist = ctx.phi_hist();
    let vel_star = ctx.vel_star();
    let sav_star = ctx.sav_star();

    let m_star = phi_star.map(|v| mobility_of_phi(v, p));
    let op = build_ch_operator(g, &m_star, p, bdf.a0, dt)?;

    let adv = ops::advect_scalar(g, &vel_star, &phi_star)?;
    let b1: Vec<f64> = phi_hist
        .data
        .iter()
        .zip(&adv.data)
        .map(|(h, a)| h / dt - sav_star.transport * a)
        .collect();
    let nl = split_nonlinearity(&phi_star, p.s);
    let coef = p.lambda * sav_star.chemical / p.epsilon;
    let b2: Vec<f64> = nl.data.iter().map(|v| coef * v).collect();

    let guess = ctx.state.phi.data.clone();
    let (phi, mu, report) = op.solve(
        &b1,
        &b2,
        Some(&guess),
        ctx.tol.ch,
        ctx.tol.max_iter,
        spectral,
    )?;
    let phi_new = ScalarField::from_vec(g, ScalarKind::Phi, phi)?;
    let mu_new = ScalarField::from_vec(g, ScalarKind::Mu, mu)?;
    if !phi_new.is_finite() || !mu_new.is_finite() {
        return Err(Error::NonFinite("phase field"));
    }

    let q_integrand_part1 = ops::inner_cells(g, &adv, &mu_new);
    let r_new = update_r(ctx, &phi_new, &phi_star, &phi_hist);
    Ok(ChStepOutput {
        phi_new,
        mu_new,
        r_new,
        q_integrand_part1,
        report,
    })
}

/// `a0 r^{n+1} - h(r) = alpha (-(a0 E0^{n+1} - h(E0))
///   + (lambda r* / eps) <f(phi*) - s phi*, a0 phi^{n+1} - h(phi)>)`.
pub fn update_r(
    ctx: &StepContext,
    phi_new: &ScalarField,
    phi_star: &ScalarField,
    phi_hist: &ScalarField,
) -> f64 {
    let g = ctx.grid;
    let p = ctx.params;
    let bdf = ctx.bdf;
    let e0_new = e0_functional(g, phi_new, p);
    let e0_n = e0_functional(g, &ctx.state.phi, p);
    let e0_nm1 = ctx
        .history()
        .map_or(0.0, |h| e0_functional(g, &h.phi, p));
    let (r_n, r_nm1) = ctx.sav_levels(|s| s.chemical);
    let r_star = bdf.star(r_n, r_nm1);
    let nl = split_nonlinearity(phi_star, p.s);
    let dphi = phi_new.lincomb(bdf.a0, phi_hist, -1.0);
    let work = ops::inner_cells(g, &nl, &dphi);
    let rhs = p.alpha * (-bdf.diff(e0_new, e0_n, e0_nm1) + p.lambda * r_star / p.epsilon * work);
    r_from_difference(bdf, r_n, r_nm1, rhs)
}

/// Solves `a0 x^{n+1} - h(x) = rhs` for `x^{n+1}`.
pub(crate) fn r_from_difference(bdf: Bdf, xn: f64, xnm1: f64, rhs: f64) -> f64 {
    (bdf.hist(xn, xnm1) + rhs) / bdf.a0
}
