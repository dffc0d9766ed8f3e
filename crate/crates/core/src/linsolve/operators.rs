//! Operators of the Cahn-Hilliard and momentum systems.

use super::krylov::{bicgstab, cg, solve_s_metric_cg};
use super::spectral::SpectralSolver;
use super::{LinearOperator, SolveReport};
use crate::error::{Error, Result};
use crate::field::{FaceField, FaceKind, ScalarField};
use crate::grid::Grid;
use crate::ops::{self, div_into, grad_into};
use crate::params::{Bdf, FluidParams};

/// `y = -div(coef grad x)`.
fn neg_div_coef_grad(g: &Grid, coef: &FaceField, x: &[f64], y: &mut [f64]) {
    let mut gu = vec![0.0; g.n_u()];
    let mut gv = vec![0.0; g.n_v()];
    grad_into(g, x, &mut gu, &mut gv);
    gu.iter_mut().zip(&coef.u).for_each(|(a, c)| *a *= -c);
    gv.iter_mut().zip(&coef.v).for_each(|(a, c)| *a *= -c);
    div_into(g, &gu, &gv, y);
}

/// The coupled `(phi, mu)` system of the Cahn-Hilliard step:
///
/// ```text
/// c phi - div(M grad mu)                  = b1
/// mu + lambda eps lap phi - (lambda s / eps) phi = b2
/// ```
///
/// with `c = a0 / dt`. Acts on `[phi..., mu...]`.
pub struct ChBlockOperator {
    pub(crate) grid: Grid,
    pub(crate) mobility: FaceField,
    pub(crate) constant_mobility: Option<f64>,
    pub(crate) c: f64,
    pub(crate) lambda: f64,
    pub(crate) epsilon: f64,
    pub(crate) s: f64,
}

/// Mobility at faces from the cell values of `M(phi*)`; `None` in `constant`
/// unless every face carries the same value.
pub fn build_ch_operator(
    grid: &Grid,
    m_star: &ScalarField,
    params: &FluidParams,
    a0: f64,
    dt: f64,
) -> Result<ChBlockOperator> {
    m_star.check(grid)?;
    if let Some(&bad) = m_star.data.iter().find(|m| **m < 0.0) {
        return Err(Error::NegativeCoefficient(bad));
    }
    let mobility = ops::face_average(grid, m_star)?;
    let first = m_star.data[0];
    let constant_mobility = if m_star.data.iter().all(|m| *m == first) {
        Some(first)
    } else {
        None
    };
    Ok(ChBlockOperator {
        grid: grid.clone(),
        mobility,
        constant_mobility,
        c: a0 / dt,
        lambda: params.lambda,
        epsilon: params.epsilon,
        s: params.s,
    })
}

impl LinearOperator for ChBlockOperator {
    fn dim(&self) -> usize {
        2 * self.grid.n_cells()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.grid.n_cells();
        let (phi, mu) = x.split_at(n);
        let (y1, y2) = y.split_at_mut(n);
        neg_div_coef_grad(&self.grid, &self.mobility, mu, y1);
        y1.iter_mut().zip(phi).for_each(|(y, p)| *y += self.c * p);
        let mut lap = vec![0.0; n];
        let ones = FaceField {
            u: vec![1.0; self.grid.n_u()],
            v: vec![1.0; self.grid.n_v()],
            ..FaceField::zeros(&self.grid, FaceKind::Flux)
        };
        neg_div_coef_grad(&self.grid, &ones, phi, &mut lap);
        let (le, ls) = (self.lambda * self.epsilon, self.lambda * self.s / self.epsilon);
        for k in 0..n {
            y2[k] = mu[k] - le * lap[k] - ls * phi[k];
        }
    }

    fn is_symmetric(&self) -> bool {
        false
    }

    fn describe(&self) -> &str {
        "cahn-hilliard block"
    }
}

impl ChBlockOperator {
    pub fn eliminated(&self) -> ChEliminated<'_> {
        ChEliminated { block: self }
    }

    /// Solves the block system for right-hand sides `b1`, `b2`.
    ///
    /// `mu` is eliminated through the second row, `mu = b2 + S phi` with
    /// `S = lambda eps L + lambda s / eps` and `L = -lap`, which leaves
    /// `(c + L_M S) phi = b1 - L_M b2`. The mean of `phi` is then fixed
    /// exactly from `mean(rhs) / c`, since `L_M` annihilates constants.
    pub fn solve(
        &self,
        b1: &[f64],
        b2: &[f64],
        x0: Option<&[f64]>,
        tol: f64,
        max_iter: usize,
        spectral: Option<&SpectralSolver>,
    ) -> Result<(Vec<f64>, Vec<f64>, SolveReport)> {
        let g = &self.grid;
        let n = g.n_cells();
        let el = self.eliminated();
        let mut lb2 = vec![0.0; n];
        el.apply_lm(b2, &mut lb2);
        let rhs: Vec<f64> = b1.iter().zip(&lb2).map(|(a, b)| a - b).collect();

        let (mut phi, mut report) = match (self.constant_mobility, spectral) {
            (Some(m), Some(sp)) if sp.grid() == g => {
                let (c, le, ls) = (self.c, self.lambda * self.epsilon, self.lambda * self.s / self.epsilon);
                let x = sp.solve_symbol(&rhs, &|l| c + m * l * (le * l + ls));
                (x, SolveReport::trivial())
            }
            _ if self.s > 0.0 => {
                let s_op = |x: &[f64], y: &mut [f64]| el.apply_s(x, y);
                let l_op = |x: &[f64], y: &mut [f64]| el.apply_lm(x, y);
                solve_s_metric_cg(self.c, &s_op, &l_op, &rhs, x0, tol, max_iter)
            }
            _ => bicgstab(&el, &rhs, x0, tol, max_iter),
        };

        let shift = rhs.iter().sum::<f64>() / (n as f64 * self.c) - phi.iter().sum::<f64>() / n as f64;
        phi.iter_mut().for_each(|v| *v += shift);

        let mut aphi = vec![0.0; n];
        el.apply(&phi, &mut aphi);
        let bn = ops::dot(&rhs, &rhs).sqrt();
        let rn = aphi
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        report.final_residual = if bn > 0.0 { rn / bn } else { rn };
        report.converged = report.final_residual <= tol;
        if !report.converged {
            return Err(Error::SolverDiverged {
                system: "cahn-hilliard",
                report,
            });
        }
        let mut mu = vec![0.0; n];
        el.apply_s(&phi, &mut mu);
        mu.iter_mut().zip(b2).for_each(|(m, b)| *m += b);
        Ok((phi, mu, report))
    }
}

/// `c I + L_M S`, the Cahn-Hilliard system with `mu` eliminated.
pub struct ChEliminated<'a> {
    block: &'a ChBlockOperator,
}

impl ChEliminated<'_> {
    /// `S x = lambda eps (-lap x) + (lambda s / eps) x`.
    pub fn apply_s(&self, x: &[f64], y: &mut [f64]) {
        let b = self.block;
        let g = &b.grid;
        let mut gu = vec![0.0; g.n_u()];
        let mut gv = vec![0.0; g.n_v()];
        grad_into(g, x, &mut gu, &mut gv);
        div_into(g, &gu, &gv, y);
        let (le, ls) = (b.lambda * b.epsilon, b.lambda * b.s / b.epsilon);
        y.iter_mut().zip(x).for_each(|(y, x)| *y = -le * *y + ls * x);
    }

    /// `L_M x = -div(M grad x)`.
    pub fn apply_lm(&self, x: &[f64], y: &mut [f64]) {
        neg_div_coef_grad(&self.block.grid, &self.block.mobility, x, y);
    }
}

impl LinearOperator for ChEliminated<'_> {
    fn dim(&self) -> usize {
        self.block.grid.n_cells()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut sx = vec![0.0; x.len()];
        self.apply_s(x, &mut sx);
        self.apply_lm(&sx, y);
        y.iter_mut().zip(x).for_each(|(y, x)| *y += self.block.c * x);
    }

    fn is_symmetric(&self) -> bool {
        false
    }

    fn describe(&self) -> &str {
        "cahn-hilliard eliminated"
    }
}

/// Face mass coefficient `K (a0 rho^{n+1} + (a0 rho^{n+1} - h(rho)) / 2) / dt`.
pub fn momentum_mass(
    grid: &Grid,
    rho_np1: &FaceField,
    rho_hist: &FaceField,
    k_coeff: f64,
    bdf: Bdf,
    dt: f64,
) -> Result<FaceField> {
    let f = |r1: f64, rh: f64| k_coeff * (bdf.a0 * r1 + 0.5 * (bdf.a0 * r1 - rh)) / dt;
    let mut out = FaceField::zeros(grid, FaceKind::Flux);
    let mut min = f64::INFINITY;
    for j in 0..grid.ny {
        for i in 0..grid.nux() {
            if grid.u_on_wall(i) {
                continue;
            }
            let k = grid.uidx(i, j);
            out.u[k] = f(rho_np1.u[k], rho_hist.u[k]);
            min = min.min(out.u[k]);
        }
    }
    for j in 0..grid.nvy() {
        if grid.v_on_wall(j) {
            continue;
        }
        for i in 0..grid.nx {
            let k = grid.vidx(i, j);
            out.v[k] = f(rho_np1.v[k], rho_hist.v[k]);
            min = min.min(out.v[k]);
        }
    }
    if !(min > 0.0) {
        return Err(Error::NonPositiveMass(min));
    }
    Ok(out)
}

/// `mass u - div(nu D(u))` on the velocity faces; wall faces map to
/// themselves so the system stays square and symmetric.
pub struct MomentumOperator {
    grid: Grid,
    mass: FaceField,
    nu: Vec<f64>,
    nu_corner: Vec<f64>,
}

pub fn build_momentum_operator(
    grid: &Grid,
    mass: FaceField,
    nu_np1: &ScalarField,
) -> Result<MomentumOperator> {
    nu_np1.check(grid)?;
    mass.check(grid)?;
    if let Some(&bad) = nu_np1.data.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidParams(format!("viscosity must be positive, found {bad}")));
    }
    Ok(MomentumOperator {
        grid: grid.clone(),
        mass,
        nu_corner: ops::corner_values(grid, &nu_np1.data),
        nu: nu_np1.data.clone(),
    })
}

impl MomentumOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn solve(
        &self,
        rhs: &FaceField,
        x0: Option<&FaceField>,
        tol: f64,
        max_iter: usize,
    ) -> Result<(FaceField, SolveReport)> {
        let mut b = rhs.clone();
        b.apply_wall_bc(&self.grid);
        let flat = b.to_flat();
        let guess = x0.map(|x| x.to_flat());
        let (x, report) = cg(self, &flat, guess.as_deref(), tol, max_iter);
        if !report.converged {
            return Err(Error::SolverDiverged {
                system: "momentum",
                report,
            });
        }
        let mut out = FaceField::from_flat(&self.grid, FaceKind::Velocity, &x)?;
        out.apply_wall_bc(&self.grid);
        Ok((out, report))
    }
}

impl LinearOperator for MomentumOperator {
    fn dim(&self) -> usize {
        self.grid.n_u() + self.grid.n_v()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = &self.grid;
        let mut vel = FaceField::from_flat(g, FaceKind::Velocity, x).expect("length checked");
        let raw = vel.clone();
        vel.apply_wall_bc(g);
        let s = ops::strain_div_raw(g, &self.nu, &self.nu_corner, &vel);
        let nu_len = g.n_u();
        for k in 0..nu_len {
            y[k] = self.mass.u[k] * vel.u[k] - s.u[k];
        }
        for k in 0..g.n_v() {
            y[nu_len + k] = self.mass.v[k] * vel.v[k] - s.v[k];
        }
        for j in 0..g.ny {
            for i in 0..g.nux() {
                if g.u_on_wall(i) {
                    y[g.uidx(i, j)] = raw.u[g.uidx(i, j)];
                }
            }
        }
        for j in 0..g.nvy() {
            if g.v_on_wall(j) {
                for i in 0..g.nx {
                    y[nu_len + g.vidx(i, j)] = raw.v[g.vidx(i, j)];
                }
            }
        }
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn describe(&self) -> &str {
        "momentum"
    }

    fn diagonal(&self) -> Option<Vec<f64>> {
        let g = &self.grid;
        let d = ops::strain_diagonal(g, &self.nu);
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..g.ny {
            for i in 0..g.nux() {
                let k = g.uidx(i, j);
                out.push(if g.u_on_wall(i) { 1.0 } else { self.mass.u[k] + d.u[k] });
            }
        }
        for j in 0..g.nvy() {
            for i in 0..g.nx {
                let k = g.vidx(i, j);
                out.push(if g.v_on_wall(j) { 1.0 } else { self.mass.v[k] + d.v[k] });
            }
        }
        Some(out)
    }
}
