//! Optimistic saddle-point solvers driven by possibly corrupted gradient oracles.

mod gap;
mod oftrl;
mod omda;
mod trace;

pub use gap::duality_gap;
pub use oftrl::{oftrl_gap_bound, oftrl_player_step, oftrl_solve, OftrlConfig};
pub use omda::{
    calibrate_spms_constant, omda_contraction, omda_floor, omda_solve, omda_step_pair,
    select_omda_rate, OmdaConfig, OmdaStep, RateMode,
};
pub use trace::{IterationRecord, Pair, SolverKind, SolverTrace};

use crate::domains::{Domain, GradientOracle, Objective};
use crate::error::Result;
use crate::scalar::Scalar;

/// A configured saddle-point method that can be run against any oracle.
pub trait SaddleSolver<T: Scalar> {
    fn kind(&self) -> SolverKind;

    /// Runs the method; `evaluator` enables gap tracking where the method supports it.
    fn run(
        &self,
        oracle: &mut dyn GradientOracle<T>,
        dom_x: &dyn Domain<T>,
        dom_y: &dyn Domain<T>,
        evaluator: Option<&dyn Objective<T>>,
    ) -> Result<SolverTrace<T>>;
}

impl<T: Scalar> SaddleSolver<T> for OftrlConfig<T> {
    fn kind(&self) -> SolverKind {
        SolverKind::Oftrl
    }

    fn run(
        &self,
        oracle: &mut dyn GradientOracle<T>,
        dom_x: &dyn Domain<T>,
        dom_y: &dyn Domain<T>,
        evaluator: Option<&dyn Objective<T>>,
    ) -> Result<SolverTrace<T>> {
        oftrl_solve(oracle, dom_x, dom_y, self, evaluator)
    }
}

impl<T: Scalar> SaddleSolver<T> for OmdaConfig<T> {
    fn kind(&self) -> SolverKind {
        SolverKind::Omda
    }

    fn run(
        &self,
        oracle: &mut dyn GradientOracle<T>,
        dom_x: &dyn Domain<T>,
        dom_y: &dyn Domain<T>,
        _evaluator: Option<&dyn Objective<T>>,
    ) -> Result<SolverTrace<T>> {
        omda_solve(oracle, dom_x, dom_y, self, None)
    }
}
