//! Step 2: the momentum solve and the `R`, `K`, `Q` updates.

use super::ch_step::{r_from_difference, ChStepOutput};
use super::StepContext;
use crate::error::{Error, Result};
use crate::field::{FaceField, FaceKind, ScalarField};
use crate::grid::Grid;
use crate::linsolve::{build_momentum_operator, momentum_mass, SolveReport};
use crate::ops;
use crate::params::{mobility_of_phi, nu_of_phi, rho_of_phi, FluidParams};

#[derive(Debug, Clone)]
pub struct NsStepOutput {
    pub vel_new: FaceField,
    pub r_conv_new: f64,
    pub k_new: f64,
    pub q_new: f64,
    pub rho_new: ScalarField,
    pub nu_new: ScalarField,
    pub report: SolveReport,
}

/// Relative diffusive flux `M(phi) grad mu (rho2 - rho1) / 2`, with the
/// mobility averaged to faces.
pub fn compute_j(grid: &Grid, mu: &ScalarField, phi: &ScalarField, params: &FluidParams) -> Result<FaceField> {
    let m = phi.map(|v| mobility_of_phi(v, params));
    let mf = ops::face_average(grid, &m)?;
    let gm = ops::gradient(grid, mu)?;
    let mut j = ops::face_product(&mf, &gm).scaled(0.5 * (params.rho2 - params.rho1));
    j.kind = FaceKind::Flux;
    Ok(j)
}

pub fn rho_field(phi: &ScalarField, params: &FluidParams) -> ScalarField {
    phi.map(|v| rho_of_phi(v, params))
}

pub fn nu_field(phi: &ScalarField, params: &FluidParams) -> ScalarField {
    phi.map(|v| nu_of_phi(v, params))
}

/// Gravity body force `rho_f g` at faces.
pub(crate) fn gravity_force(grid: &Grid, rho_f: &FaceField, g: [f64; 2]) -> FaceField {
    let mut f = rho_f.clone();
    f.u.iter_mut().for_each(|v| *v *= g[0]);
    f.v.iter_mut().for_each(|v| *v *= g[1]);
    f.apply_wall_bc(grid);
    f
}

fn combine_faces(a: f64, x: &FaceField, b: f64, y: Option<&FaceField>) -> FaceField {
    match y {
        Some(y) if b != 0.0 => x.lincomb(a, y, b),
        _ => x.scaled(a),
    }
}

pub fn step2(ctx: &StepContext, ch: &ChStepOutput) -> Result<NsStepOutput> {
    let g = ctx.grid;
    let p = ctx.params;
    let bdf = ctx.bdf;
    let dt = ctx.dt;
    let hist = ctx.history();

    let sav_star = ctx.sav_star();
    let phi_star = ctx.phi_star();
    let mu_star = ctx.mu_star();
    let vel_star = ctx.vel_star();

    let rho_new = rho_field(&ch.phi_new, p);
    let nu_new = nu_field(&ch.phi_new, p);
    debug_assert!(rho_new
        .data
        .iter()
        .all(|r| *r >= p.rho1.min(p.rho2) && *r <= p.rho1.max(p.rho2)));
    let rho_f_new = ops::face_average(g, &rho_new)?;
    let rho_f_n = ops::face_average(g, &rho_field(&ctx.state.phi, p))?;
    let rho_f_nm1 = match hist {
        Some(h) => Some(ops::face_average(g, &rho_field(&h.phi, p))?),
        None => None,
    };
    let rho_f_hist = combine_faces(bdf.c_n, &rho_f_n, bdf.c_nm1, rho_f_nm1.as_ref());
    let vel_hist = combine_faces(bdf.c_n, &ctx.state.vel, bdf.c_nm1, hist.map(|h| &h.vel));

    let k_star = sav_star.kinetic;
    let mass = momentum_mass(g, &rho_f_new, &rho_f_hist, k_star, bdf, dt)?;
    let op = build_momentum_operator(g, mass, &nu_new)?;

    let p_ext = ctx.pressure_extrapolation();
    let gp = ops::gradient(g, &p_ext)?;
    let j_star = compute_j(g, &mu_star, &phi_star, p)?;
    let conv = ops::convection_momentum(g, &rho_new, &vel_star, &vel_star)?;
    let flux = ops::flux_gradient_terms(g, &j_star, &vel_star)?;
    let cap = ops::capillary_force(g, &phi_star, &mu_star)?;
    let grav = gravity_force(g, &rho_f_new, p.gravity);

    let explicit = conv.lincomb(1.0, &flux, 1.0).lincomb(1.0, &gp, 1.0);
    let mut rhs = ops::face_product(&rho_f_new, &vel_hist).scaled(k_star / dt);
    let rs = sav_star.convection;
    let qs = sav_star.transport;
    for k in 0..rhs.u.len() {
        rhs.u[k] += -rs * explicit.u[k] - qs * cap.u[k] + grav.u[k];
    }
    for k in 0..rhs.v.len() {
        rhs.v[k] += -rs * explicit.v[k] - qs * cap.v[k] + grav.v[k];
    }
    rhs.apply_wall_bc(g);

    let (vel_new, report) = op.solve(&rhs, Some(&ctx.state.vel), ctx.tol.momentum, ctx.tol.max_iter)?;
    if !vel_new.is_finite() {
        return Err(Error::NonFinite("velocity"));
    }

    let (r_n, r_nm1) = ctx.sav_levels(|s| s.convection);
    let r_integrand = ops::inner_faces(g, &explicit, &vel_new);
    let r_conv_new = r_from_difference(bdf, r_n, r_nm1, dt * p.alpha * rs * r_integrand);

    let (k_n, k_nm1) = ctx.sav_levels(|s| s.kinetic);
    let k_integrand = kinetic_integrand(
        g,
        bdf.a0,
        &rho_f_new,
        &rho_f_hist,
        &vel_new,
        &vel_hist,
        &ctx.state.vel,
        &rho_f_n,
        hist.map(|h| &h.vel).zip(rho_f_nm1.as_ref()),
        (bdf.c_n, bdf.c_nm1),
        k_star,
        dt,
    );
    let k_new = r_from_difference(bdf, k_n, k_nm1, dt * p.alpha * k_integrand);

    let q_new = finalize_q(ctx, ch.q_integrand_part1, &cap, &vel_new);

    Ok(NsStepOutput {
        vel_new,
        r_conv_new,
        k_new,
        q_new,
        rho_new,
        nu_new,
        report,
    })
}

/// Integrand of the `K` update:
/// `int -(a0 e^{n+1} - h(e)) / dt + K* (rho (a0 u - h(u)) + (a0 rho - h(rho)) u / 2) / dt . u`
/// with `e = rho |u|^2 / 2` on faces.
#[allow(clippy::too_many_arguments)]
fn kinetic_integrand(
    g: &Grid,
    a0: f64,
    rho_new: &FaceField,
    rho_hist: &FaceField,
    vel_new: &FaceField,
    vel_hist: &FaceField,
    vel_n: &FaceField,
    rho_n: &FaceField,
    prev: Option<(&FaceField, &FaceField)>,
    (c_n, c_nm1): (f64, f64),
    k_star: f64,
    dt: f64,
) -> f64 {
    let mut acc = 0.0;
    let mut add = |k: usize, pick: fn(&FaceField) -> &Vec<f64>| {
        let u1 = pick(vel_new)[k];
        let r1 = pick(rho_new)[k];
        let e_new = 0.5 * r1 * u1 * u1;
        let un = pick(vel_n)[k];
        let mut e_hist = c_n * 0.5 * pick(rho_n)[k] * un * un;
        if let Some((v, r)) = prev {
            let um = pick(v)[k];
            e_hist += c_nm1 * 0.5 * pick(r)[k] * um * um;
        }
        let force = r1 * (a0 * u1 - pick(vel_hist)[k]) + 0.5 * (a0 * r1 - pick(rho_hist)[k]) * u1;
        acc += (-(a0 * e_new - e_hist) + k_star * force * u1) / dt;
    };
    for k in 0..vel_new.u.len() {
        add(k, |f| &f.u);
    }
    for k in 0..vel_new.v.len() {
        add(k, |f| &f.v);
    }
    acc * g.cell_area()
}

/// `a0 Q^{n+1} - h(Q) = dt alpha Q* (<advect(u*, phi*), mu^{n+1}> + <phi* grad mu*, u^{n+1}>)`.
pub fn finalize_q(ctx: &StepContext, q_integrand_part1: f64, cap: &FaceField, vel_new: &FaceField) -> f64 {
    let g = ctx.grid;
    let (q_n, q_nm1) = ctx.sav_levels(|s| s.transport);
    let q_star = ctx.bdf.star(q_n, q_nm1);
    let integrand = q_integrand_part1 + ops::inner_faces(g, cap, vel_new);
    r_from_difference(ctx.bdf, q_n, q_nm1, ctx.dt * ctx.params.alpha * q_star * integrand)
}
