//! Deterministic adaptive integration over `R^d` and `(0, t) x R^d`, and a
//! brute-force grid oracle.
//!
//! Everything here is sequential with a fixed subdivision order, so equal
//! inputs give bit-identical [`Estimate`]s. Parallelism lives one level up,
//! across independent integrals.

mod adaptive;
pub(crate) mod gaussian;
mod grid;
pub(crate) mod polar;
mod rules;
mod space;
mod time;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use adaptive::{adaptive_1d, adaptive_cube, integrate_1d, Tol};
pub use grid::grid_oracle_integrate;
pub use space::{integrate_space, Domain};
pub use time::{graded_mesh, integrate_time_space};

/// Where an integrand may be singular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SingularityMode {
    #[default]
    None,
    /// Integrable singularity at the coordinate origin, handled in polar
    /// coordinates centred there.
    RadialOrigin,
}

/// Tolerances and limits shared by all integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: u64,
    /// Gaussian factors are cut off at `tail_sigma * sqrt(4t)` from their
    /// centre; the discarded mass is of order `exp(-tail_sigma^2)`.
    pub tail_sigma: f64,
    pub singularity_mode: SingularityMode,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_evals: 5_000_000,
            tail_sigma: 6.0,
            singularity_mode: SingularityMode::None,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn with_singularity(mut self, mode: SingularityMode) -> Self {
        self.singularity_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        if self.max_evals == 0 {
            return Err(domain("max_evals must be positive"));
        }
        if !(self.tail_sigma > 0.0) || !self.tail_sigma.is_finite() {
            return Err(domain("tail_sigma must be finite and positive"));
        }
        Ok(())
    }

    /// The cutoff in units of `sqrt(4t)`, raised for very tight relative
    /// tolerances so that the discarded tail stays below them.
    pub fn effective_tail(&self) -> f64 {
        if self.rel_tol < 1e-10 {
            self.tail_sigma.max((-self.rel_tol.ln()).sqrt() + 1.0)
        } else {
            self.tail_sigma
        }
    }

    pub(crate) fn tol(&self) -> Tol {
        Tol { abs: self.abs_tol, rel: self.rel_tol, max_evals: self.max_evals }
    }
}

/// A value with an error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err_bound: f64,
    pub evals: u64,
    pub converged: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, err_bound: 0.0, evals: 0, converged: true }
    }

    pub fn zero() -> Self {
        Self::exact(0.0)
    }

    /// Sum of two independent estimates.
    pub fn plus(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            err_bound: self.err_bound + other.err_bound,
            evals: self.evals + other.evals,
            converged: self.converged && other.converged,
        }
    }

    pub fn scaled(self, c: f64) -> Estimate {
        Estimate { value: self.value * c, err_bound: self.err_bound * c.abs(), ..self }
    }

    /// Whether `err_bound <= max(abs_tol, rel_tol |value|)`.
    pub fn meets(&self, abs_tol: f64, rel_tol: f64) -> bool {
        self.err_bound <= abs_tol.max(rel_tol * self.value.abs())
    }
}
