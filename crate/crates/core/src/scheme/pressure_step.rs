//! Step 3: pressure increment, pressure update and the `T` update.

use super::ch_step::r_from_difference;
use super::StepContext;
use crate::error::{Error, Result};
use crate::field::{FaceField, ScalarField, ScalarKind};
use crate::linsolve::{SolveReport, SpectralSolver};
use crate::ops;

#[derive(Debug, Clone)]
pub struct PressureStepOutput {
    pub p_new: ScalarField,
    /// `psi` (first order) or `omega` (second order).
    pub increment_new: ScalarField,
    pub t_new: f64,
    pub report: SolveReport,
}

fn poisson_checked(ctx: &StepContext, sp: &SpectralSolver, rhs: &ScalarField) -> Result<(ScalarField, SolveReport)> {
    let (x, report) = sp.poisson(rhs)?;
    if !(report.final_residual <= ctx.tol.poisson) {
        return Err(Error::SolverDiverged {
            system: "pressure poisson",
            report,
        });
    }
    Ok((x, report))
}

/// Penalty form: `lap psi = T^n chi / (2 dt) div u`, `p = p^n + psi`,
/// `T^{n+1} = T^n + dt alpha T^n <p^{n+1}, div u^{n+1}>`.
pub fn step3_order1(ctx: &StepContext, sp: &SpectralSolver, vel_new: &FaceField) -> Result<PressureStepOutput> {
    let g = ctx.grid;
    let (t_n, t_nm1) = ctx.sav_levels(|s| s.penalty);
    let t_star = ctx.bdf.star(t_n, t_nm1);
    let div = ops::divergence(g, vel_new)?;
    let rhs = div.scaled(t_star * ctx.scheme.chi / (2.0 * ctx.dt));
    let (psi, report) = poisson_checked(ctx, sp, &rhs)?;
    let p_new = ctx.state.p.lincomb(1.0, &psi, 1.0).with_kind(ScalarKind::Pressure);
    let integrand = ops::inner_cells(g, &p_new, &div);
    let t_new = r_from_difference(ctx.bdf, t_n, t_nm1, ctx.dt * ctx.params.alpha * t_star * integrand);
    Ok(PressureStepOutput {
        p_new,
        increment_new: psi.with_kind(ScalarKind::Psi),
        t_new,
        report,
    })
}

/// Rotational form: `lap omega = T* 3 chi / (2 dt) div u`,
/// `p = omega + p^n - T* nu div u`, and
/// `a0 T^{n+1} - h(T) = dt alpha T* (<p, div u> + beta <grad(nu div u), grad p>)`.
pub fn step3_order2(
    ctx: &StepContext,
    sp: &SpectralSolver,
    vel_new: &FaceField,
    nu_new: &ScalarField,
) -> Result<PressureStepOutput> {
    let g = ctx.grid;
    let (t_n, t_nm1) = ctx.sav_levels(|s| s.penalty);
    let t_star = ctx.bdf.star(t_n, t_nm1);
    let div = ops::divergence(g, vel_new)?;
    let rhs = div.scaled(t_star * 3.0 * ctx.scheme.chi / (2.0 * ctx.dt));
    let (omega, report) = poisson_checked(ctx, sp, &rhs)?;
    let nu_div = ScalarField::from_vec(
        g,
        ScalarKind::Generic,
        nu_new.data.iter().zip(&div.data).map(|(n, d)| n * d).collect(),
    )?;
    let p_new = omega
        .lincomb(1.0, &ctx.state.p, 1.0)
        .lincomb(1.0, &nu_div, -t_star)
        .with_kind(ScalarKind::Pressure);
    let rot = ops::inner_faces(g, &ops::gradient(g, &nu_div)?, &ops::gradient(g, &p_new)?);
    let integrand = ops::inner_cells(g, &p_new, &div) + ctx.scheme.beta * rot;
    let t_new = r_from_difference(ctx.bdf, t_n, t_nm1, ctx.dt * ctx.params.alpha * t_star * integrand);
    Ok(PressureStepOutput {
        p_new,
        increment_new: omega.with_kind(ScalarKind::Omega),
        t_new,
        report,
    })
}
