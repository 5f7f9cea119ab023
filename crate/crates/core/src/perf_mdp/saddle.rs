use crate::domains::Vector;
use crate::error::{Error, Result};
use crate::minimax::{duality_gap, oftrl_solve, OftrlConfig, SolverTrace};
use crate::robust_stats::split_batches;
use crate::scalar::Scalar;

use super::gradients::{GradientContext, LagrangianOracle};
use super::lagrangian::LagrangianObjective;
use super::model::TransitionSample;

/// Averaged OFTRL output on the empirical Lagrangian.
#[derive(Debug, Clone)]
pub struct SaddleSolution<T> {
    pub d_bar: Vector<T>,
    pub h_bar: Vector<T>,
    /// Duality gap of `(h̄, d̄)` on the exact Lagrangian of `ctx.mdp`, when requested.
    pub gap: Option<T>,
    pub trace: SolverTrace<T>,
}

/// Runs `cfg.iterations` OFTRL steps where iteration `t` estimates `ĝ_d` from batch `2t−1`
/// and `ĝ_h` from batch `2t` of `dataset`.
pub fn solve_saddle<T: Scalar>(
    ctx: &GradientContext<'_, T>,
    dataset: &[TransitionSample<T>],
    cfg: &OftrlConfig<T>,
    evaluate_gap: bool,
) -> Result<SaddleSolution<T>> {
    if cfg.iterations == 0 {
        return Err(Error::Config("need at least one iteration".into()));
    }
    let batches = split_batches(dataset, 2 * cfg.iterations)?;
    let dom_h = ctx.params.h_domain();
    let dom_d = ctx.params.d_domain(ctx.mdp.gamma());
    let mut oracle = LagrangianOracle::new(*ctx, batches);
    oracle.track_errors = false;
    let trace = oftrl_solve(&mut oracle, &dom_h, &dom_d, cfg, None)?;
    let h_bar = trace.solution.x.clone();
    let d_bar = trace.solution.y.clone();
    let gap = if evaluate_gap {
        let objective = LagrangianObjective::new(ctx.mdp.clone(), ctx.params.clone())?;
        Some(duality_gap(&objective, &dom_h, &dom_d, &h_bar, &d_bar)?)
    } else {
        None
    };
    Ok(SaddleSolution { d_bar, h_bar, gap, trace })
}
