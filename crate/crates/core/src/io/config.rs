//! Run configuration in TOML.
//!
//! ```toml
//! scenario = "bubble_case1"      # required, one of scenarios::AVAILABLE
//!
//! [overrides]                    # all optional
//! dt = 1e-4
//! order = 2                      # 1 or 2
//! alpha = 1e-5
//! s = 4.0
//! grid = [64, 128]               # nx, ny
//! t_end = 3.0
//! out = "out/bubble"
//! cadence = 100
//! tol_ch = 1e-10
//! tol_momentum = 1e-9
//! tol_poisson = 1e-11
//! max_iter = 2000
//! seed = 0                       # reserved, not used by the solver
//!
//! [params]                       # optional, replaces the scenario's block
//! rho1 = 1000.0
//! ...
//! mobility = { kind = "degenerate", gamma = 4e-5 }
//! gravity = [0.0, -0.98]
//! ```
//!
//! Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{FluidParams, Order, SchemeConfig, Tolerances};
use crate::scenarios::Scenario;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Order>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cadence: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_ch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_momentum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_poisson: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Overrides {
    /// Fields set in `other` win.
    pub fn merged(&self, other: &Overrides) -> Overrides {
        Overrides {
            dt: other.dt.or(self.dt),
            order: other.order.or(self.order),
            alpha: other.alpha.or(self.alpha),
            s: other.s.or(self.s),
            grid: other.grid.or(self.grid),
            t_end: other.t_end.or(self.t_end),
            out: other.out.clone().or_else(|| self.out.clone()),
            cadence: other.cadence.or(self.cadence),
            tol_ch: other.tol_ch.or(self.tol_ch),
            tol_momentum: other.tol_momentum.or(self.tol_momentum),
            tol_poisson: other.tol_poisson.or(self.tol_poisson),
            max_iter: other.max_iter.or(self.max_iter),
            seed: other.seed.or(self.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<FluidParams>,
}

impl RunConfig {
    pub fn for_scenario(name: &str) -> Self {
        RunConfig {
            scenario: name.to_string(),
            overrides: Overrides::default(),
            params: None,
        }
    }

    /// Applies the overrides to the named scenario and validates the result.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        let mut sc = Scenario::by_name(&self.scenario)?;
        let o = &self.overrides;
        if let Some(p) = &self.params {
            sc.params = p.clone();
        }
        if let Some(a) = o.alpha {
            sc.params.alpha = a;
        }
        if let Some(s) = o.s {
            sc.params.s = s;
        }
        if let Some([nx, ny]) = o.grid {
            sc.grid.nx = nx;
            sc.grid.ny = ny;
        }
        if let Some(dt) = o.dt {
            sc.dt = dt;
        }
        if let Some(order) = o.order {
            sc.order = order;
        }
        if let Some(t) = o.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("t_end must be > 0, got {t}")));
            }
            sc.t_end = t;
        }
        if let Some(c) = o.cadence {
            if c == 0 {
                return Err(Error::Config("cadence must be positive".into()));
            }
            sc.cadence = c;
        }
        sc.params.validate()?;
        sc.build_grid()?;
        let d = Tolerances::default();
        let tol = Tolerances {
            ch: o.tol_ch.unwrap_or(d.ch),
            momentum: o.tol_momentum.unwrap_or(d.momentum),
            poisson: o.tol_poisson.unwrap_or(d.poisson),
            max_iter: o.max_iter.unwrap_or(d.max_iter),
        };
        let scheme = SchemeConfig::with_tolerances(sc.order, sc.dt, &sc.params, tol)?;
        Ok(ResolvedRun {
            out: o.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&sc.name)),
            seed: o.seed.unwrap_or(0),
            scenario: sc,
            scheme,
        })
    }
}

/// A configuration with every default filled in and every invariant checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub scenario: Scenario,
    pub scheme: SchemeConfig,
    pub out: PathBuf,
    pub seed: u64,
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.resolve()?;
    Ok(cfg)
}

pub fn emit_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))
}
