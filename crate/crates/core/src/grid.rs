//! Uniform two-dimensional staggered (MAC) grid.
//!
//! Scalars live at cell centres `(i + 1/2) hx, (j + 1/2) hy`. The x-velocity
//! lives on x-normal faces at `i hx`, the y-velocity on y-normal faces at
//! `j hy`. Along a periodic axis there are `n` faces (face 0 is shared with
//! face `n`); along a wall axis there are `n + 1` faces and the two outer ones
//! carry the no-penetration condition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tangential velocity condition on a pair of walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallKind {
    NoSlip,
    FreeSlip,
}

/// Boundary treatment of one axis (both ends share it).
///
/// For scalars a wall means homogeneous Neumann; for velocity it means zero
/// normal component plus the given tangential condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Wall(WallKind),
}

impl Boundary {
    pub fn is_periodic(self) -> bool {
        matches!(self, Boundary::Periodic)
    }

    pub fn is_wall(self) -> bool {
        !self.is_periodic()
    }

    /// Sign applied to the first interior tangential value to form the ghost
    /// value behind a wall: `-1` for no-slip, `+1` for free-slip.
    pub(crate) fn ghost_sign(self) -> f64 {
        match self {
            Boundary::Wall(WallKind::NoSlip) => -1.0,
            _ => 1.0,
        }
    }
}

/// Boundary conditions of the whole box: `x` governs the walls at `x = 0, lx`
/// and `y` the walls at `y = 0, ly`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BcSpec {
    pub x: Boundary,
    pub y: Boundary,
}

impl BcSpec {
    pub const PERIODIC: BcSpec = BcSpec {
        x: Boundary::Periodic,
        y: Boundary::Periodic,
    };

    /// Channel with free-slip vertical walls and no-slip horizontal walls.
    pub const CHANNEL: BcSpec = BcSpec {
        x: Boundary::Wall(WallKind::FreeSlip),
        y: Boundary::Wall(WallKind::NoSlip),
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub hx: f64,
    pub hy: f64,
    pub bc: BcSpec,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, bc: BcSpec) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 cells per axis, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "domain extents must be positive, got {lx}x{ly}"
            )));
        }
        Ok(Grid {
            nx,
            ny,
            lx,
            ly,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
            bc,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Columns of x-normal faces.
    pub fn nux(&self) -> usize {
        if self.bc.x.is_periodic() {
            self.nx
        } else {
            self.nx + 1
        }
    }

    /// Rows of y-normal faces.
    pub fn nvy(&self) -> usize {
        if self.bc.y.is_periodic() {
            self.ny
        } else {
            self.ny + 1
        }
    }

    pub fn n_u(&self) -> usize {
        self.nux() * self.ny
    }

    pub fn n_v(&self) -> usize {
        self.nx * self.nvy()
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    #[inline]
    pub fn uidx(&self, i: usize, j: usize) -> usize {
        i + self.nux() * j
    }

    #[inline]
    pub fn vidx(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn xc(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hx
    }

    pub fn yc(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.hy
    }

    /// Whether x-face column `i` lies on a wall (its value is pinned to zero).
    #[inline]
    pub fn u_on_wall(&self, i: usize) -> bool {
        self.bc.x.is_wall() && (i == 0 || i == self.nx)
    }

    #[inline]
    pub fn v_on_wall(&self, j: usize) -> bool {
        self.bc.y.is_wall() && (j == 0 || j == self.ny)
    }

    /// Neighbouring cell index along x with periodic wrap or mirror clamp.
    #[inline]
    pub(crate) fn wrap_x(&self, i: isize) -> usize {
        wrap(i, self.nx, self.bc.x)
    }

    #[inline]
    pub(crate) fn wrap_y(&self, j: isize) -> usize {
        wrap(j, self.ny, self.bc.y)
    }
}

#[inline]
fn wrap(i: isize, n: usize, bc: Boundary) -> usize {
    let n = n as isize;
    debug_assert!(i >= -n && i < 2 * n);
    if bc.is_periodic() {
        if i < 0 {
            (i + n) as usize
        } else if i >= n {
            (i - n) as usize
        } else {
            i as usize
        }
    } else {
        i.clamp(0, n - 1) as usize
    }
}
