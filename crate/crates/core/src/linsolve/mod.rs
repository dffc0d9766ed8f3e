//! Linear solvers for the three elliptic systems of a time step.

mod krylov;
mod operators;
mod spectral;

use std::fmt;

pub use krylov::{bicgstab, cg, solve_krylov, solve_s_metric_cg};
pub use operators::{
    build_ch_operator, build_momentum_operator, momentum_mass, ChBlockOperator, ChEliminated,
    MomentumOperator,
};
pub use spectral::{solve_poisson, SpectralSolver};

/// A square linear map on flat vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn is_symmetric(&self) -> bool;

    fn describe(&self) -> &str;

    /// Main diagonal, when cheaply available, for Jacobi scaling.
    fn diagonal(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Identity map, mostly for tests.
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn describe(&self) -> &str {
        "identity"
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual `|b - A x| / |b|`.
    pub final_residual: f64,
    pub converged: bool,
}

impl SolveReport {
    pub(crate) fn trivial() -> Self {
        SolveReport {
            iterations: 0,
            final_residual: 0.0,
            converged: true,
        }
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} iterations, relative residual {:.3e}, {}",
            self.iterations,
            self.final_residual,
            if self.converged { "converged" } else { "not converged" }
        )
    }
}
