//! FFT diagonalisation of the five-point Laplacian.
//!
//! Periodic axes use a plain FFT of length `n`. Wall (homogeneous Neumann)
//! axes use the even reflection to length `2n`, whose periodic spectrum is the
//! cosine spectrum of the Neumann Laplacian.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SolveReport;
use crate::error::{Error, Result};
use crate::field::{ScalarField, ScalarKind};
use crate::grid::Grid;
use crate::ops;

pub struct SpectralSolver {
    grid: Grid,
    ex: usize,
    ey: usize,
    /// Eigenvalues of `-d_xx` and `-d_yy` on the extended axes.
    lam_x: Vec<f64>,
    lam_y: Vec<f64>,
    fx: Arc<dyn Fft<f64>>,
    ifx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    ify: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver")
            .field("ex", &self.ex)
            .field("ey", &self.ey)
            .finish()
    }
}

fn eigenvalues(n_ext: usize, h: f64) -> Vec<f64> {
    (0..n_ext)
        .map(|k| {
            let s = (PI * k as f64 / n_ext as f64).sin();
            4.0 * s * s / (h * h)
        })
        .collect()
}

impl SpectralSolver {
    pub fn new(grid: &Grid) -> Self {
        let ex = if grid.bc.x.is_periodic() { grid.nx } else { 2 * grid.nx };
        let ey = if grid.bc.y.is_periodic() { grid.ny } else { 2 * grid.ny };
        let mut planner = FftPlanner::new();
        SpectralSolver {
            grid: grid.clone(),
            ex,
            ey,
            lam_x: eigenvalues(ex, grid.hx),
            lam_y: eigenvalues(ey, grid.hy),
            fx: planner.plan_fft_forward(ex),
            ifx: planner.plan_fft_inverse(ex),
            fy: planner.plan_fft_forward(ey),
            ify: planner.plan_fft_inverse(ey),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn extend(&self, f: &[f64]) -> Vec<Complex64> {
        let g = &self.grid;
        let mut out = vec![Complex64::new(0.0, 0.0); self.ex * self.ey];
        for je in 0..self.ey {
            let j = if je < g.ny { je } else { self.ey - 1 - je };
            for ie in 0..self.ex {
                let i = if ie < g.nx { ie } else { self.ex - 1 - ie };
                out[ie + self.ex * je] = Complex64::new(f[g.cell(i, j)], 0.0);
            }
        }
        out
    }

    fn transform(&self, data: &mut [Complex64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        for row in data.chunks_exact_mut(self.ex) {
            fx.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.ey];
        for ie in 0..self.ex {
            for je in 0..self.ey {
                col[je] = data[ie + self.ex * je];
            }
            fy.process(&mut col);
            for je in 0..self.ey {
                data[ie + self.ex * je] = col[je];
            }
        }
    }

    /// Solves `P(L) x = f`, where `L` is the negative five-point Laplacian
    /// and `symbol` gives `P` at each eigenvalue of `L`. Modes with a zero
    /// symbol are set to zero.
    pub fn solve_symbol(&self, f: &[f64], symbol: &dyn Fn(f64) -> f64) -> Vec<f64> {
        let g = &self.grid;
        let mut data = self.extend(f);
        self.transform(&mut data, &self.fx, &self.fy);
        for je in 0..self.ey {
            for ie in 0..self.ex {
                let s = symbol(self.lam_x[ie] + self.lam_y[je]);
                let k = ie + self.ex * je;
                data[k] = if s == 0.0 { Complex64::new(0.0, 0.0) } else { data[k] / s };
            }
        }
        self.transform(&mut data, &self.ifx, &self.ify);
        let scale = 1.0 / (self.ex * self.ey) as f64;
        let mut out = vec![0.0; g.n_cells()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                out[g.cell(i, j)] = data[i + self.ex * j].re * scale;
            }
        }
        out
    }

    /// Mean-zero solution of `lap x = rhs - mean(rhs)`, with its residual.
    pub fn poisson(&self, rhs: &ScalarField) -> Result<(ScalarField, SolveReport)> {
        rhs.check(&self.grid)?;
        let m = rhs.mean();
        let proj: Vec<f64> = rhs.data.iter().map(|v| v - m).collect();
        let mut x = self.solve_symbol(&proj, &|l| -l);
        let xm = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v -= xm);
        let x = ScalarField::from_vec(&self.grid, ScalarKind::Generic, x)?;
        let lap = ops::laplacian(&self.grid, &x)?;
        let bn = ops::dot(&proj, &proj).sqrt();
        let rn = lap
            .data
            .iter()
            .zip(&proj)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let rel = if bn > 0.0 { rn / bn } else { rn };
        Ok((
            x,
            SolveReport {
                iterations: 1,
                final_residual: rel,
                converged: true,
            },
        ))
    }
}

/// Mean-zero solution of `lap x = rhs - mean(rhs)` on a periodic or
/// Neumann grid.
pub fn solve_poisson(grid: &Grid, rhs: &ScalarField) -> Result<ScalarField> {
    let (x, rep) = SpectralSolver::new(grid).poisson(rhs)?;
    if !rep.final_residual.is_finite() {
        return Err(Error::NonFinite("poisson solution"));
    }
    Ok(x)
}
