//! Second-order finite-difference operators on the MAC grid.
//!
//! Gradient maps cells to faces and is zero on wall faces (homogeneous
//! Neumann). Divergence maps faces to cells and ignores wall faces. With the
//! midpoint inner products below, `<grad f, F> = -<f, div F>` holds exactly,
//! and every other operator is assembled from these two so that the discrete
//! energy identities of the scheme survive.

use crate::error::{Error, Result};
use crate::field::{FaceField, FaceKind, ScalarField, ScalarKind};
use crate::grid::Grid;

#[inline]
fn u_at(g: &Grid, u: &[f64], i: isize, j: usize) -> f64 {
    if g.bc.x.is_periodic() {
        u[g.uidx(g.wrap_x(i), j)]
    } else if i <= 0 || i >= g.nx as isize {
        0.0
    } else {
        u[g.uidx(i as usize, j)]
    }
}

#[inline]
fn v_at(g: &Grid, v: &[f64], i: usize, j: isize) -> f64 {
    if g.bc.y.is_periodic() {
        v[g.vidx(i, g.wrap_y(j))]
    } else if j <= 0 || j >= g.ny as isize {
        0.0
    } else {
        v[g.vidx(i, j as usize)]
    }
}

#[inline]
fn cell_at(g: &Grid, f: &[f64], i: isize, j: isize) -> f64 {
    f[g.cell(g.wrap_x(i), g.wrap_y(j))]
}

/// Average of the four cells around corner `(i, j)`.
#[inline]
fn corner_avg(g: &Grid, f: &[f64], i: usize, j: usize) -> f64 {
    let (i, j) = (i as isize, j as isize);
    0.25 * (cell_at(g, f, i - 1, j - 1)
        + cell_at(g, f, i, j - 1)
        + cell_at(g, f, i - 1, j)
        + cell_at(g, f, i, j))
}

fn check_faces(g: &Grid, f: &FaceField) -> Result<()> {
    f.check(g)
}

pub fn gradient(g: &Grid, f: &ScalarField) -> Result<FaceField> {
    f.check(g)?;
    let mut out = FaceField::zeros(g, FaceKind::Flux);
    grad_into(g, &f.data, &mut out.u, &mut out.v);
    Ok(out)
}

pub(crate) fn grad_into(g: &Grid, f: &[f64], gu: &mut [f64], gv: &mut [f64]) {
    let (rx, ry) = (1.0 / g.hx, 1.0 / g.hy);
    for j in 0..g.ny {
        for i in 0..g.nux() {
            gu[g.uidx(i, j)] = if g.u_on_wall(i) {
                0.0
            } else {
                let w = g.wrap_x(i as isize - 1);
                (f[g.cell(i % g.nx, j)] - f[g.cell(w, j)]) * rx
            };
        }
    }
    for j in 0..g.nvy() {
        for i in 0..g.nx {
            gv[g.vidx(i, j)] = if g.v_on_wall(j) {
                0.0
            } else {
                let s = g.wrap_y(j as isize - 1);
                (f[g.cell(i, j % g.ny)] - f[g.cell(i, s)]) * ry
            };
        }
    }
}

pub fn divergence(g: &Grid, f: &FaceField) -> Result<ScalarField> {
    check_faces(g, f)?;
    let mut out = ScalarField::zeros(g, ScalarKind::Generic);
    div_into(g, &f.u, &f.v, &mut out.data);
    Ok(out)
}

pub(crate) fn div_into(g: &Grid, fu: &[f64], fv: &[f64], out: &mut [f64]) {
    let (rx, ry) = (1.0 / g.hx, 1.0 / g.hy);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (ii, jj) = (i as isize, j as isize);
            out[g.cell(i, j)] = (u_at(g, fu, ii + 1, j) - u_at(g, fu, ii, j)) * rx
                + (v_at(g, fv, i, jj + 1) - v_at(g, fv, i, jj)) * ry;
        }
    }
}

/// Five-point Laplacian `div(grad f)`.
pub fn laplacian(g: &Grid, f: &ScalarField) -> Result<ScalarField> {
    let gf = gradient(g, f)?;
    divergence(g, &gf)
}

/// Face values of a cell field by arithmetic mean of the two adjacent cells.
/// Wall faces take the value of their single neighbour.
pub fn face_average(g: &Grid, c: &ScalarField) -> Result<FaceField> {
    c.check(g)?;
    let mut out = FaceField::zeros(g, FaceKind::Flux);
    for j in 0..g.ny {
        for i in 0..g.nux() {
            let (ii, jj) = (i as isize, j as isize);
            out.u[g.uidx(i, j)] =
                0.5 * (cell_at(g, &c.data, ii - 1, jj) + cell_at(g, &c.data, ii, jj));
        }
    }
    for j in 0..g.nvy() {
        for i in 0..g.nx {
            let (ii, jj) = (i as isize, j as isize);
            out.v[g.vidx(i, j)] =
                0.5 * (cell_at(g, &c.data, ii, jj - 1) + cell_at(g, &c.data, ii, jj));
        }
    }
    Ok(out)
}

/// Elementwise product of two face fields.
pub fn face_product(a: &FaceField, b: &FaceField) -> FaceField {
    let mut out = a.clone();
    out.u.iter_mut().zip(&b.u).for_each(|(x, y)| *x *= y);
    out.v.iter_mut().zip(&b.v).for_each(|(x, y)| *x *= y);
    out
}

/// Conservative `div(coef grad f)` with face coefficients.
pub fn div_coef_grad(g: &Grid, coef: &FaceField, f: &ScalarField) -> Result<ScalarField> {
    check_faces(g, coef)?;
    if let Some(&bad) = coef.u.iter().chain(&coef.v).find(|c| **c < 0.0) {
        return Err(Error::NegativeCoefficient(bad));
    }
    let gf = gradient(g, f)?;
    divergence(g, &face_product(coef, &gf))
}

/// Central conservative `div(u f)` with `f` averaged to faces.
pub fn advect_scalar(g: &Grid, vel: &FaceField, f: &ScalarField) -> Result<ScalarField> {
    check_faces(g, vel)?;
    let fa = face_average(g, f)?;
    divergence(g, &face_product(vel, &fa))
}

/// Capillary force `phi grad mu` at faces, with `phi` averaged to faces.
///
/// Paired with [`advect_scalar`] it satisfies
/// `<advect(u, phi), mu> + <capillary(phi, mu), u> = 0`.
pub fn capillary_force(g: &Grid, phi: &ScalarField, mu: &ScalarField) -> Result<FaceField> {
    let pa = face_average(g, phi)?;
    let gm = gradient(g, mu)?;
    let mut out = face_product(&pa, &gm);
    out.kind = FaceKind::Flux;
    Ok(out)
}

/// Skew-symmetric convection `rho (w.grad) u + 1/2 div(rho w) u` at faces.
pub fn convection_momentum(
    g: &Grid,
    rho: &ScalarField,
    w: &FaceField,
    vel: &FaceField,
) -> Result<FaceField> {
    rho.check(g)?;
    check_faces(g, w)?;
    check_faces(g, vel)?;
    Ok(skew_convection(g, Some(&rho.data), w, vel))
}

/// `J.grad u + 1/2 div(J) u` at faces; convection with unit density.
pub fn flux_gradient_terms(g: &Grid, j: &FaceField, vel: &FaceField) -> Result<FaceField> {
    check_faces(g, j)?;
    check_faces(g, vel)?;
    Ok(skew_convection(g, None, j, vel))
}

/// Conservative form minus half the mass divergence, which collapses to
/// `1/2 sum_faces m_f (u_nb)` differences around each velocity control volume.
fn skew_convection(g: &Grid, rho: Option<&[f64]>, w: &FaceField, vel: &FaceField) -> FaceField {
    let mut out = FaceField::zeros(g, FaceKind::Velocity);
    let (rx, ry) = (1.0 / g.hx, 1.0 / g.hy);
    let rc = |i: isize, j: isize| rho.map_or(1.0, |r| cell_at(g, r, i, j));
    let rk = |i: usize, j: usize| rho.map_or(1.0, |r| corner_avg(g, r, i, j));
    let (u, v) = (&vel.u, &vel.v);

    for j in 0..g.ny {
        let jj = j as isize;
        for i in 0..g.nux() {
            if g.u_on_wall(i) {
                continue;
            }
            let ii = i as isize;
            let m_e = rc(ii, jj) * 0.5 * (u_at(g, &w.u, ii, j) + u_at(g, &w.u, ii + 1, j));
            let m_w = rc(ii - 1, jj) * 0.5 * (u_at(g, &w.u, ii - 1, j) + u_at(g, &w.u, ii, j));
            let ci = g.wrap_x(ii - 1);
            let ce = i % g.nx;
            let wn = 0.5 * (v_at(g, &w.v, ci, jj + 1) + v_at(g, &w.v, ce, jj + 1));
            let ws = 0.5 * (v_at(g, &w.v, ci, jj) + v_at(g, &w.v, ce, jj));
            let m_n = if wn == 0.0 { 0.0 } else { rk(i, j + 1) * wn };
            let m_s = if ws == 0.0 { 0.0 } else { rk(i, j) * ws };
            let u_e = u_at(g, u, ii + 1, j);
            let u_w = u_at(g, u, ii - 1, j);
            let u_n = if m_n == 0.0 { 0.0 } else { u[g.uidx(i, (j + 1) % g.ny)] };
            let u_s = if m_s == 0.0 { 0.0 } else { u[g.uidx(i, (j + g.ny - 1) % g.ny)] };
            out.u[g.uidx(i, j)] = 0.5 * ((m_e * u_e - m_w * u_w) * rx + (m_n * u_n - m_s * u_s) * ry);
        }
    }

    for j in 0..g.nvy() {
        if g.v_on_wall(j) {
            continue;
        }
        let jj = j as isize;
        for i in 0..g.nx {
            let ii = i as isize;
            let m_n = rc(ii, jj) * 0.5 * (v_at(g, &w.v, i, jj) + v_at(g, &w.v, i, jj + 1));
            let m_s = rc(ii, jj - 1) * 0.5 * (v_at(g, &w.v, i, jj - 1) + v_at(g, &w.v, i, jj));
            let cs = g.wrap_y(jj - 1);
            let cn = j % g.ny;
            let we = 0.5 * (u_at(g, &w.u, ii + 1, cs) + u_at(g, &w.u, ii + 1, cn));
            let ww = 0.5 * (u_at(g, &w.u, ii, cs) + u_at(g, &w.u, ii, cn));
            let m_e = if we == 0.0 { 0.0 } else { rk(i + 1, j) * we };
            let m_w = if ww == 0.0 { 0.0 } else { rk(i, j) * ww };
            let v_n = v_at(g, v, i, jj + 1);
            let v_s = v_at(g, v, i, jj - 1);
            let v_e = if m_e == 0.0 { 0.0 } else { v[g.vidx((i + 1) % g.nx, j)] };
            let v_w = if m_w == 0.0 { 0.0 } else { v[g.vidx((i + g.nx - 1) % g.nx, j)] };
            out.v[g.vidx(i, j)] = 0.5 * ((m_e * v_e - m_w * v_w) * rx + (m_n * v_n - m_s * v_s) * ry);
        }
    }
    out
}

/// Stress components of `nu D(u)`: normal stresses at cells, shear at corners.
struct Stress {
    dxx: Vec<f64>,
    dyy: Vec<f64>,
    txx: Vec<f64>,
    tyy: Vec<f64>,
    /// Corner `(i, j)` at `(i hx, j hy)`; `nux() x nvy()` of them.
    txy: Vec<f64>,
    dxy: Vec<f64>,
}

fn shear_rate(g: &Grid, vel: &FaceField, i: usize, j: usize) -> f64 {
    let (u, v) = (&vel.u, &vel.v);
    let (rx, ry) = (1.0 / g.hx, 1.0 / g.hy);
    let du = if g.u_on_wall(i) {
        0.0
    } else if g.bc.y.is_periodic() {
        u[g.uidx(i, j % g.ny)] - u[g.uidx(i, (j + g.ny - 1) % g.ny)]
    } else if j == 0 {
        let a = u[g.uidx(i, 0)];
        a - g.bc.y.ghost_sign() * a
    } else if j == g.ny {
        let b = u[g.uidx(i, g.ny - 1)];
        g.bc.y.ghost_sign() * b - b
    } else {
        u[g.uidx(i, j)] - u[g.uidx(i, j - 1)]
    };
    let dv = if g.v_on_wall(j) {
        0.0
    } else if g.bc.x.is_periodic() {
        v[g.vidx(i % g.nx, j)] - v[g.vidx((i + g.nx - 1) % g.nx, j)]
    } else if i == 0 {
        let a = v[g.vidx(0, j)];
        a - g.bc.x.ghost_sign() * a
    } else if i == g.nx {
        let b = v[g.vidx(g.nx - 1, j)];
        g.bc.x.ghost_sign() * b - b
    } else {
        v[g.vidx(i, j)] - v[g.vidx(i - 1, j)]
    };
    du * ry + dv * rx
}

/// `nu` averaged to the `nux() x nvy()` cell corners.
pub(crate) fn corner_values(g: &Grid, nu: &[f64]) -> Vec<f64> {
    let ncx = g.nux();
    let mut out = vec![0.0; ncx * g.nvy()];
    for j in 0..g.nvy() {
        for i in 0..ncx {
            out[i + ncx * j] = corner_avg(g, nu, i, j);
        }
    }
    out
}

fn stress(g: &Grid, nu: &[f64], nu_corner: &[f64], vel: &FaceField) -> Stress {
    let (rx, ry) = (1.0 / g.hx, 1.0 / g.hy);
    let mut dxx = vec![0.0; g.n_cells()];
    let mut dyy = vec![0.0; g.n_cells()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = g.cell(i, j);
            let (ii, jj) = (i as isize, j as isize);
            dxx[c] = 2.0 * (u_at(g, &vel.u, ii + 1, j) - u_at(g, &vel.u, ii, j)) * rx;
            dyy[c] = 2.0 * (v_at(g, &vel.v, i, jj + 1) - v_at(g, &vel.v, i, jj)) * ry;
        }
    }
    let txx = dxx.iter().zip(nu).map(|(d, n)| d * n).collect();
    let tyy = dyy.iter().zip(nu).map(|(d, n)| d * n).collect();
    let (ncx, ncy) = (g.nux(), g.nvy());
    let mut txy = vec![0.0; ncx * ncy];
    let mut dxy = vec![0.0; ncx * ncy];
    for j in 0..ncy {
        for i in 0..ncx {
            let d = shear_rate(g, vel, i, j);
            dxy[i + ncx * j] = d;
            txy[i + ncx * j] = nu_corner[i + ncx * j] * d;
        }
    }
    Stress {
        dxx,
        dyy,
        txx,
        tyy,
        txy,
        dxy,
    }
}

/// Quadrature weight of corner `(i, j)`: halved on each wall it touches.
fn corner_weight(g: &Grid, i: usize, j: usize) -> f64 {
    let wx = if g.bc.x.is_wall() && (i == 0 || i == g.nx) { 0.5 } else { 1.0 };
    let wy = if g.bc.y.is_wall() && (j == 0 || j == g.ny) { 0.5 } else { 1.0 };
    wx * wy
}

/// `div(nu (grad u + grad u^T))` at velocity faces; wall faces are zero.
pub fn strain_divergence(g: &Grid, nu: &ScalarField, vel: &FaceField) -> Result<FaceField> {
    nu.check(g)?;
    check_faces(g, vel)?;
    Ok(strain_div_raw(g, &nu.data, &corner_values(g, &nu.data), vel))
}

pub(crate) fn strain_div_raw(g: &Grid, nu: &[f64], nu_corner: &[f64], vel: &FaceField) -> FaceField {
    let s = stress(g, nu, nu_corner, vel);
    let (rx, ry) = (1.0 / g.hx, 1.0 / g.hy);
    let ncx = g.nux();
    let ncy = g.nvy();
    let mut out = FaceField::zeros(g, FaceKind::Velocity);
    for j in 0..g.ny {
        for i in 0..g.nux() {
            if g.u_on_wall(i) {
                continue;
            }
            let e = g.cell(i % g.nx, j);
            let w = g.cell(g.wrap_x(i as isize - 1), j);
            let jn = (j + 1) % ncy;
            out.u[g.uidx(i, j)] =
                (s.txx[e] - s.txx[w]) * rx + (s.txy[i + ncx * jn] - s.txy[i + ncx * j]) * ry;
        }
    }
    for j in 0..g.nvy() {
        if g.v_on_wall(j) {
            continue;
        }
        for i in 0..g.nx {
            let n = g.cell(i, j % g.ny);
            let so = g.cell(i, g.wrap_y(j as isize - 1));
            let ie = (i + 1) % ncx;
            out.v[g.vidx(i, j)] =
                (s.txy[ie + ncx * j] - s.txy[i + ncx * j]) * rx + (s.tyy[n] - s.tyy[so]) * ry;
        }
    }
    out
}

/// `1/2 int nu |D(u)|^2` with the quadrature that makes
/// `-<strain_divergence(nu, u), u>` equal to it exactly.
pub fn strain_dissipation(g: &Grid, nu: &ScalarField, vel: &FaceField) -> Result<f64> {
    nu.check(g)?;
    check_faces(g, vel)?;
    let s = stress(g, &nu.data, &corner_values(g, &nu.data), vel);
    let mut acc = 0.0;
    for c in 0..g.n_cells() {
        acc += 0.5 * (s.txx[c] * s.dxx[c] + s.tyy[c] * s.dyy[c]);
    }
    let ncx = g.nux();
    for j in 0..g.nvy() {
        for i in 0..ncx {
            let k = i + ncx * j;
            acc += corner_weight(g, i, j) * s.txy[k] * s.dxy[k];
        }
    }
    Ok(acc * g.cell_area())
}

/// Diagonal of `-strain_divergence(nu, .)`, used for Jacobi scaling.
pub(crate) fn strain_diagonal(g: &Grid, nu: &[f64]) -> FaceField {
    let (rx2, ry2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    let mut d = FaceField::zeros(g, FaceKind::Flux);
    let ghost_y = 1.0 - g.bc.y.ghost_sign();
    let ghost_x = 1.0 - g.bc.x.ghost_sign();
    for j in 0..g.ny {
        for i in 0..g.nux() {
            if g.u_on_wall(i) {
                d.u[g.uidx(i, j)] = 1.0;
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            let normal = 2.0 * (cell_at(g, nu, ii, jj) + cell_at(g, nu, ii - 1, jj)) * rx2;
            let shear_n = corner_avg(g, nu, i, j + 1)
                * if g.bc.y.is_wall() && j + 1 == g.ny { ghost_y } else { 1.0 };
            let shear_s = corner_avg(g, nu, i, j)
                * if g.bc.y.is_wall() && j == 0 { ghost_y } else { 1.0 };
            d.u[g.uidx(i, j)] = normal + (shear_n + shear_s) * ry2;
        }
    }
    for j in 0..g.nvy() {
        for i in 0..g.nx {
            if g.v_on_wall(j) {
                d.v[g.vidx(i, j)] = 1.0;
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            let normal = 2.0 * (cell_at(g, nu, ii, jj) + cell_at(g, nu, ii, jj - 1)) * ry2;
            let shear_e = corner_avg(g, nu, i + 1, j)
                * if g.bc.x.is_wall() && i + 1 == g.nx { ghost_x } else { 1.0 };
            let shear_w = corner_avg(g, nu, i, j)
                * if g.bc.x.is_wall() && i == 0 { ghost_x } else { 1.0 };
            d.v[g.vidx(i, j)] = normal + (shear_e + shear_w) * rx2;
        }
    }
    d
}

/// Midpoint quadrature `sum f hx hy`.
pub fn integrate(g: &Grid, f: &ScalarField) -> f64 {
    f.data.iter().sum::<f64>() * g.cell_area()
}

/// Cell inner product `sum a b hx hy`.
pub fn inner_cells(g: &Grid, a: &ScalarField, b: &ScalarField) -> f64 {
    dot(&a.data, &b.data) * g.cell_area()
}

/// Face inner product; each face carries the weight `hx hy`.
pub fn inner_faces(g: &Grid, a: &FaceField, b: &FaceField) -> f64 {
    (dot(&a.u, &b.u) + dot(&a.v, &b.v)) * g.cell_area()
}

pub fn norm_sq_cells(g: &Grid, a: &ScalarField) -> f64 {
    inner_cells(g, a, a)
}

pub fn norm_sq_faces(g: &Grid, a: &FaceField) -> f64 {
    inner_faces(g, a, a)
}

/// `sum_f w_f a_f b_f hx hy` over faces.
pub fn weighted_inner_faces(g: &Grid, w: &FaceField, a: &FaceField, b: &FaceField) -> f64 {
    let su: f64 = w.u.iter().zip(&a.u).zip(&b.u).map(|((w, a), b)| w * a * b).sum();
    let sv: f64 = w.v.iter().zip(&a.v).zip(&b.v).map(|((w, a), b)| w * a * b).sum();
    (su + sv) * g.cell_area()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Velocity components interpolated to cell centres.
pub fn velocity_at_centres(g: &Grid, vel: &FaceField) -> Result<(ScalarField, ScalarField)> {
    check_faces(g, vel)?;
    let mut uc = ScalarField::zeros(g, ScalarKind::Generic);
    let mut vc = ScalarField::zeros(g, ScalarKind::Generic);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (ii, jj) = (i as isize, j as isize);
            uc.data[g.cell(i, j)] = 0.5 * (u_at(g, &vel.u, ii, j) + u_at(g, &vel.u, ii + 1, j));
            vc.data[g.cell(i, j)] = 0.5 * (v_at(g, &vel.v, i, jj) + v_at(g, &vel.v, i, jj + 1));
        }
    }
    Ok((uc, vc))
}
