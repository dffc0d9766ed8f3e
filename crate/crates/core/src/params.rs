//! Physical parameters, material laws and time-stepping configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Mobility {
    /// `M(phi) = m0`.
    Constant { m0: f64 },
    /// `M(phi) = gamma (phi^2 - 1)^2`, vanishing in the pure phases.
    Degenerate { gamma: f64 },
}

impl Mobility {
    pub fn is_constant(&self) -> bool {
        matches!(self, Mobility::Constant { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidParams {
    pub rho1: f64,
    pub rho2: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// Surface-tension parameter.
    pub lambda: f64,
    /// Interface thickness.
    pub epsilon: f64,
    /// Stabilisation constant of the split double-well potential.
    pub s: f64,
    /// Relaxation of the auxiliary-variable dynamics.
    pub alpha: f64,
    pub mobility: Mobility,
    pub gravity: [f64; 2],
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("lambda", self.lambda),
            ("epsilon", self.epsilon),
            ("alpha", self.alpha),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParams(format!("s must be >= 0, got {}", self.s)));
        }
        match self.mobility {
            Mobility::Constant { m0 } if !(m0 >= 0.0 && m0.is_finite()) => {
                return Err(Error::InvalidParams(format!("mobility m0 must be >= 0, got {m0}")))
            }
            Mobility::Degenerate { gamma } if !(gamma >= 0.0 && gamma.is_finite()) => {
                return Err(Error::InvalidParams(format!(
                    "mobility gamma must be >= 0, got {gamma}"
                )))
            }
            _ => {}
        }
        if !self.gravity.iter().all(|g| g.is_finite()) {
            return Err(Error::InvalidParams("gravity must be finite".into()));
        }
        Ok(())
    }

    pub fn chi(&self) -> f64 {
        self.rho1.min(self.rho2)
    }

    pub fn has_gravity(&self) -> bool {
        self.gravity != [0.0, 0.0]
    }
}

#[inline]
fn clip(phi: f64) -> f64 {
    phi.clamp(-1.0, 1.0)
}

/// Density from the phase field; `phi` is clipped to `[-1, 1]` first.
#[inline]
pub fn rho_of_phi(phi: f64, p: &FluidParams) -> f64 {
    let c = clip(phi);
    0.5 * c * (p.rho1 - p.rho2) + 0.5 * (p.rho1 + p.rho2)
}

/// Viscosity from the phase field; `phi` is clipped to `[-1, 1]` first.
#[inline]
pub fn nu_of_phi(phi: f64, p: &FluidParams) -> f64 {
    let c = clip(phi);
    0.5 * c * (p.nu1 - p.nu2) + 0.5 * (p.nu1 + p.nu2)
}

/// Mobility, evaluated on the raw (unclipped) phase field.
#[inline]
pub fn mobility_of_phi(phi: f64, p: &FluidParams) -> f64 {
    match p.mobility {
        Mobility::Constant { m0 } => m0,
        Mobility::Degenerate { gamma } => {
            let w = phi * phi - 1.0;
            gamma * w * w
        }
    }
}

/// Derivative of the double well, `phi^3 - phi`.
#[inline]
pub fn f_well(phi: f64) -> f64 {
    phi * phi * phi - phi
}

/// Double-well potential `(phi^2 - 1)^2 / 4`.
#[inline]
pub fn big_f_well(phi: f64) -> f64 {
    let w = phi * phi - 1.0;
    0.25 * w * w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn as_u8(self) -> u8 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

impl TryFrom<u8> for Order {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            other => Err(format!("scheme order must be 1 or 2, got {other}")),
        }
    }
}

impl From<Order> for u8 {
    fn from(o: Order) -> u8 {
        o.as_u8()
    }
}

/// Backward-difference time discretisation written as
/// `(a0 x^{n+1} - h(x)) / dt` with `h(x) = c_n x^n + c_nm1 x^{n-1}`, and the
/// matching explicit extrapolation `x* = e_n x^n + e_nm1 x^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bdf {
    pub a0: f64,
    pub c_n: f64,
    pub c_nm1: f64,
    pub e_n: f64,
    pub e_nm1: f64,
}

impl Bdf {
    pub const FIRST: Bdf = Bdf {
        a0: 1.0,
        c_n: 1.0,
        c_nm1: 0.0,
        e_n: 1.0,
        e_nm1: 0.0,
    };

    pub const SECOND: Bdf = Bdf {
        a0: 1.5,
        c_n: 2.0,
        c_nm1: -0.5,
        e_n: 2.0,
        e_nm1: -1.0,
    };

    pub fn for_order(order: Order) -> Bdf {
        match order {
            Order::First => Bdf::FIRST,
            Order::Second => Bdf::SECOND,
        }
    }

    pub fn is_second(&self) -> bool {
        self.c_nm1 != 0.0
    }

    #[inline]
    pub fn hist(&self, xn: f64, xnm1: f64) -> f64 {
        self.c_n * xn + self.c_nm1 * xnm1
    }

    #[inline]
    pub fn star(&self, xn: f64, xnm1: f64) -> f64 {
        self.e_n * xn + self.e_nm1 * xnm1
    }

    /// `a0 x^{n+1} - h(x)`.
    #[inline]
    pub fn diff(&self, xnp1: f64, xn: f64, xnm1: f64) -> f64 {
        self.a0 * xnp1 - self.hist(xn, xnm1)
    }
}

/// Relative tolerances and iteration cap for the three linear solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ch: f64,
    pub momentum: f64,
    pub poisson: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ch: 1e-10,
            momentum: 1e-9,
            poisson: 1e-11,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub order: Order,
    pub dt: f64,
    /// `min(rho1, rho2)`, the density scale of the pressure penalty.
    pub chi: f64,
    /// Weight of the rotational term in the penalty-variable update.
    pub beta: f64,
    pub tol: Tolerances,
}

impl SchemeConfig {
    pub fn new(order: Order, dt: f64, params: &FluidParams) -> Result<Self> {
        Self::with_tolerances(order, dt, params, Tolerances::default())
    }

    pub fn with_tolerances(
        order: Order,
        dt: f64,
        params: &FluidParams,
        tol: Tolerances,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
        }
        for (name, v) in [("ch", tol.ch), ("momentum", tol.momentum), ("poisson", tol.poisson)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} tolerance must lie in (0, 1), got {v}"
                )));
            }
        }
        if tol.max_iter == 0 {
            return Err(Error::InvalidParams("max_iter must be positive".into()));
        }
        let chi = params.chi();
        let beta = match order {
            Order::First => 0.0,
            Order::Second => 2.0 * dt / (3.0 * chi),
        };
        Ok(SchemeConfig {
            order,
            dt,
            chi,
            beta,
            tol,
        })
    }
}
