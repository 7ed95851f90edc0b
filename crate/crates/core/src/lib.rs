//! Two-sided Skorokhod problem with time-dependent nonlinear constraints.
//!
//! Given a càdlàg driver `S` and a pair of constraint functions `(L, R)`, the
//! solver finds the regulator `K` such that `X = S + K` satisfies
//! `L(t, X_t) <= 0 <= R(t, X_t)`, with `K = Kr − Kl` where `Kr` only grows
//! while `R(t, X_t) = 0` and `Kl` only grows while `L(t, X_t) = 0`.
//!
//! Paths are piecewise constant on a finite grid and evaluated right-continuously.

// `!(a < b)` is used on purpose so that NaN falls on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundaries;
pub mod decomposition;
pub mod error;
pub mod genpaths;
pub mod io;
pub mod pathkit;
pub mod reflector;
pub mod verify;

pub use boundaries::{validate_assumption, BoundaryFunction, BoundaryPair, Family, ValidationReport};
pub use decomposition::{
    oscillation_times, piecewise_representation, split_variation, support_check, OscillationSchedule, ScheduleCase,
    SupportReport,
};
pub use error::{Error, Result};
pub use genpaths::{GenSpec, PathKind};
pub use pathkit::{CadlagPath, PreOrigin, RangeExtrema, TimeGrid};
pub use reflector::{
    coupled_fixpoint, envelopes, reflect_direct, reflect_stream, solve, solve_one_sided, SkorokhodSolution,
};
pub use verify::VerificationReport;

/// Numerical tolerances shared by the solver and the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Root residual, relative to `max(1, |g(t, v)|)`.
    pub root: f64,
    pub root_max_iter: usize,
    /// Slack allowed on every verified inequality.
    pub check: f64,
    /// Smallest accepted separation `alpha`.
    pub sep: f64,
    /// Stopping distance between successive coupled fixed-point sweeps.
    pub fix: f64,
    pub max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root: 1e-12,
            root_max_iter: 200,
            check: 1e-9,
            sep: 1e-9,
            fix: 1e-10,
            max_sweeps: 100,
        }
    }
}

impl Tolerances {
    pub fn with_root(mut self, root: f64) -> Self {
        self.root = root;
        self
    }

    pub fn with_check(mut self, check: f64) -> Self {
        self.check = check;
        self
    }
}
