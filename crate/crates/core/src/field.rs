//! Cell-centred scalar fields and face-normal vector fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// What a scalar field represents. Purely descriptive; operators do not
/// dispatch on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarKind {
    Phi,
    Mu,
    Pressure,
    Omega,
    Psi,
    Generic,
}

impl ScalarKind {
    pub fn name(self) -> &'static str {
        match self {
            ScalarKind::Phi => "phi",
            ScalarKind::Mu => "mu",
            ScalarKind::Pressure => "p",
            ScalarKind::Omega => "omega",
            ScalarKind::Psi => "psi",
            ScalarKind::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceKind {
    Velocity,
    Flux,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub nx: usize,
    pub ny: usize,
    pub kind: ScalarKind,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid, kind: ScalarKind) -> Self {
        Self::constant(grid, kind, 0.0)
    }

    pub fn constant(grid: &Grid, kind: ScalarKind, value: f64) -> Self {
        ScalarField {
            nx: grid.nx,
            ny: grid.ny,
            kind,
            data: vec![value; grid.n_cells()],
        }
    }

    pub fn from_fn(grid: &Grid, kind: ScalarKind, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                data.push(f(grid.xc(i), grid.yc(j)));
            }
        }
        ScalarField {
            nx: grid.nx,
            ny: grid.ny,
            kind,
            data,
        }
    }

    pub fn from_vec(grid: &Grid, kind: ScalarKind, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.n_cells() {
            return Err(Error::DimensionMismatch {
                expected: (grid.nx, grid.ny),
                found: (data.len(), 1),
            });
        }
        Ok(ScalarField {
            nx: grid.nx,
            ny: grid.ny,
            kind,
            data,
        })
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.nx != grid.nx || self.ny != grid.ny || self.data.len() != grid.n_cells() {
            return Err(Error::DimensionMismatch {
                expected: (grid.nx, grid.ny),
                found: (self.nx, self.ny),
            });
        }
        Ok(())
    }

    pub fn with_kind(mut self, kind: ScalarKind) -> Self {
        self.kind = kind;
        self
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i + self.nx * j]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            nx: self.nx,
            ny: self.ny,
            kind: ScalarKind::Generic,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `a * self + b * other`, elementwise.
    pub fn lincomb(&self, a: f64, other: &ScalarField, b: f64) -> Self {
        ScalarField {
            nx: self.nx,
            ny: self.ny,
            kind: self.kind,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= a);
        out
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Face-normal vector field: `u` on x-faces, `v` on y-faces.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    pub nux: usize,
    pub ny: usize,
    pub nx: usize,
    pub nvy: usize,
    pub kind: FaceKind,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: &Grid, kind: FaceKind) -> Self {
        FaceField {
            nux: grid.nux(),
            ny: grid.ny,
            nx: grid.nx,
            nvy: grid.nvy(),
            kind,
            u: vec![0.0; grid.n_u()],
            v: vec![0.0; grid.n_v()],
        }
    }

    /// Samples `f` at face centres and zeroes wall-normal faces.
    pub fn from_fn(
        grid: &Grid,
        kind: FaceKind,
        fu: impl Fn(f64, f64) -> f64,
        fv: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut out = Self::zeros(grid, kind);
        for j in 0..grid.ny {
            for i in 0..grid.nux() {
                out.u[grid.uidx(i, j)] = fu(i as f64 * grid.hx, grid.yc(j));
            }
        }
        for j in 0..grid.nvy() {
            for i in 0..grid.nx {
                out.v[grid.vidx(i, j)] = fv(grid.xc(i), j as f64 * grid.hy);
            }
        }
        out.apply_wall_bc(grid);
        out
    }

    /// Builds from one flat vector laid out as `[u..., v...]`.
    pub fn from_flat(grid: &Grid, kind: FaceKind, flat: &[f64]) -> Result<Self> {
        if flat.len() != grid.n_u() + grid.n_v() {
            return Err(Error::DimensionMismatch {
                expected: (grid.n_u(), grid.n_v()),
                found: (flat.len(), 0),
            });
        }
        let mut out = Self::zeros(grid, kind);
        out.u.copy_from_slice(&flat[..grid.n_u()]);
        out.v.copy_from_slice(&flat[grid.n_u()..]);
        Ok(out)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.u.len() + self.v.len());
        flat.extend_from_slice(&self.u);
        flat.extend_from_slice(&self.v);
        flat
    }

    pub fn len(&self) -> usize {
        self.u.len() + self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.u.len() != grid.n_u() || self.v.len() != grid.n_v() {
            return Err(Error::DimensionMismatch {
                expected: (grid.n_u(), grid.n_v()),
                found: (self.u.len(), self.v.len()),
            });
        }
        Ok(())
    }

    /// Sets the no-penetration faces on walls to exactly zero.
    pub fn apply_wall_bc(&mut self, grid: &Grid) {
        if grid.bc.x.is_wall() {
            for j in 0..grid.ny {
                self.u[grid.uidx(0, j)] = 0.0;
                self.u[grid.uidx(grid.nx, j)] = 0.0;
            }
        }
        if grid.bc.y.is_wall() {
            for i in 0..grid.nx {
                self.v[grid.vidx(i, 0)] = 0.0;
                self.v[grid.vidx(i, grid.ny)] = 0.0;
            }
        }
    }

    pub fn lincomb(&self, a: f64, other: &FaceField, b: f64) -> Self {
        let mut out = self.clone();
        for (x, y) in out.u.iter_mut().zip(&other.u) {
            *x = a * *x + b * y;
        }
        for (x, y) in out.v.iter_mut().zip(&other.v) {
            *x = a * *x + b * y;
        }
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.u.iter_mut().chain(out.v.iter_mut()).for_each(|x| *x *= a);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}
