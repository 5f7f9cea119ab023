//! Seeded experiment runner behind the `perfoptrl` command.
//!
//! [`run`] executes one configured mode for every seed (in parallel, each seed sequential)
//! and returns a [`RunReport`] whose rows are sorted by seed, so reports are identical no
//! matter how the seeds were scheduled.

pub mod config;
pub mod lower_bound;
pub mod modes;
pub mod output;

use std::collections::BTreeMap;

use perfoptrl_core::minimax::{OftrlConfig, OmdaConfig, SaddleSolver};
use rayon::prelude::*;
use serde_json::json;

pub use config::{ConfigError, ExperimentConfig, Mode};
pub use lower_bound::{lower_bound_suite, LowerBoundReport};
pub use output::{emit_csv, emit_json, Cell, RunReport};

use config::Solver;
use modes::Row;
use output::median;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const BUILD_ID: &str = env!("PERFOPTRL_BUILD_ID");

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] perfoptrl_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// 2 for configuration problems, 1 for everything that went wrong while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Core(perfoptrl_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}

fn per_seed<F, R>(seeds: &[u64], f: F) -> Result<Vec<(u64, R)>, HarnessError>
where
    F: Fn(u64) -> perfoptrl_core::Result<R> + Sync,
    R: Send,
{
    let mut out = seeds
        .par_iter()
        .map(|&s| f(s).map(|r| (s, r)))
        .collect::<perfoptrl_core::Result<Vec<_>>>()?;
    out.sort_by_key(|(s, _)| *s);
    Ok(out)
}

fn report(cfg: &ExperimentConfig, columns: &[&'static str], rows: Vec<Row>, summary: serde_json::Value, passed: bool) -> RunReport {
    RunReport {
        version: VERSION,
        build_id: BUILD_ID,
        config: cfg.clone(),
        columns: columns.to_vec(),
        rows,
        summary,
        passed,
    }
}

/// Runs the configured mode. The configuration is re-validated first.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    cfg.validate("")?;
    match cfg.mode {
        Mode::Retrain => run_retrain(cfg),
        Mode::Minimax => run_minimax(cfg),
        Mode::Estimator => run_estimator(cfg),
        Mode::Lowerbound => run_lowerbound(cfg),
    }
}

fn run_retrain(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let grid = modes::grid_world(cfg)?;
    let results = per_seed(&cfg.seeds, |s| modes::run_retrain(cfg, &grid, s))?;
    let rounds = cfg.retrain.rounds;
    let per_round: Vec<_> = (0..rounds)
        .map(|n| {
            let vals: Vec<f64> = results.iter().map(|(_, r)| r.norm_dist[n]).collect();
            if vals.is_empty() {
                return json!({ "round": n + 1 });
            }
            json!({
                "round": n + 1,
                "median": median(&vals),
                "min": vals.iter().copied().fold(f64::INFINITY, f64::min),
                "max": vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect();
    let mc: BTreeMap<String, Option<modes::McError>> = results.iter().map(|(s, r)| (s.to_string(), r.mc_error)).collect();
    let summary = json!({ "norm_dist_by_round": per_round, "mc_relative_error": mc });
    let rows = results.into_iter().flat_map(|(_, r)| r.rows).collect();
    Ok(report(cfg, &modes::RETRAIN_COLUMNS, rows, summary, true))
}

fn run_minimax(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let results = per_seed(&cfg.seeds, |s| modes::run_minimax(cfg, s))?;
    let finals: Vec<f64> = results
        .iter()
        .filter_map(|(_, rows)| rows.last().and_then(|r| r[2].as_f64()))
        .collect();
    let summary = json!({
        "final_gap_median": (!finals.is_empty()).then(|| median(&finals)),
    });
    let rows = results.into_iter().flat_map(|(_, r)| r).collect();
    Ok(report(cfg, &modes::MINIMAX_COLUMNS, rows, summary, true))
}

fn run_estimator(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let problem = modes::estimator_problem(cfg)?;
    let results = per_seed(&cfg.seeds, |s| modes::run_estimator(cfg, &problem, s))?;
    let rows: Vec<Row> = results.into_iter().flat_map(|(_, r)| r).collect();
    let mut cells = Vec::new();
    for &eps in &cfg.estimator.epsilons {
        for &mag in &cfg.estimator.magnitudes {
            let pick = |col: usize| -> Vec<f64> {
                rows.iter()
                    .filter(|r| r[1].as_f64() == Some(eps) && r[2].as_f64() == Some(mag))
                    .filter_map(|r| r[col].as_f64())
                    .collect()
            };
            let (robust, naive) = (pick(3), pick(4));
            if robust.is_empty() {
                continue;
            }
            let bound = pick(5)[0];
            cells.push(json!({
                "epsilon": eps,
                "magnitude": mag,
                "robust_error_median": median(&robust),
                "naive_error_median": median(&naive),
                "e2_bound": bound,
                "within_bound": robust.iter().filter(|&&e| e <= bound).count() as f64 / robust.len() as f64,
            }));
        }
    }
    let summary = json!({
        "coverage": problem.setting.coverage,
        "reward_bound": problem.setting.reward_bound,
        "cells": cells,
    });
    Ok(report(cfg, &modes::ESTIMATOR_COLUMNS, rows, summary, true))
}

fn run_lowerbound(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let l = &cfg.lowerbound;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &solver in &l.solvers {
        let boxed: Box<dyn SaddleSolver<f64>> = match solver {
            Solver::Oftrl => Box::new(OftrlConfig::with_iterations(l.iterations)),
            // both presented oracles are 1-Lipschitz and 1-subregular
            Solver::Omda => Box::new(OmdaConfig::new(l.iterations, 1.0, 1.0)),
        };
        for &[z_x, z_y] in &l.noise_levels {
            let r = lower_bound_suite(boxed.as_ref(), l.dim, z_x, z_y, l.radius)?;
            for s in &r.scenarios {
                rows.push(vec![
                    r.solver.into(),
                    z_x.into(),
                    z_y.into(),
                    s.scenario.into(),
                    s.distance.into(),
                    s.gap.into(),
                    r.distance_threshold.into(),
                    r.gap_threshold.into(),
                ]);
            }
            reports.push(r);
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    let summary = json!({ "passed": passed, "suites": reports });
    Ok(report(cfg, &modes::LOWERBOUND_COLUMNS, rows, summary, passed))
}
