//! The four experiment modes. Each turns one seed into rows of its CSV schema.

use perfoptrl_core::domains::{
    make_bilinear_objective, make_scc_objective, BallDomain, BoxDomain, ConstantBias, Domain,
    GradientOracle, Matrix, NoisyOracle, Objective, Vector,
};
use perfoptrl_core::envs::{build_grid, corrupt_transition, parse_reward_table, GridCorruption, GridSpec, GridWorld};
use perfoptrl_core::minimax::{
    duality_gap, omda_solve, OftrlConfig, OmdaConfig, RateMode, SaddleSolver, SolverTrace,
};
use perfoptrl_core::perf_mdp::{
    exact_occupancy, gd_sample, mc_occupancy, repeated_retraining, GradientEstimator, MdpModel,
    OccupancyMeasure, PerformativeEnvironment, Policy, RetrainConfig, TransitionSample,
};
use perfoptrl_core::rng::{substream, Stream};
use perfoptrl_core::robust_stats::{
    contaminate, coordinate_robust_mean, estimation_error_bounds, naive_mean, CorruptionSpec,
    EstimationSetting, SampleSet,
};
use perfoptrl_core::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::{
    Estimator, ExperimentConfig, MinimaxSection, NoiseKind, ObjectiveKind, RateChoice, Solver,
};
use crate::output::Cell;

pub const RETRAIN_COLUMNS: [&str; 6] = ["seed", "round", "norm_dist", "return", "coverage_floor", "gap"];
pub const MINIMAX_COLUMNS: [&str; 5] = ["seed", "t", "gap", "noise_x", "noise_y"];
pub const ESTIMATOR_COLUMNS: [&str; 6] = ["seed", "epsilon", "magnitude", "robust_error", "naive_error", "e2_bound"];
pub const LOWERBOUND_COLUMNS: [&str; 8] = [
    "solver",
    "z_x",
    "z_y",
    "scenario",
    "distance",
    "gap",
    "distance_threshold",
    "gap_threshold",
];

pub type Row = Vec<Cell>;

// ---------------------------------------------------------------- retrain

pub fn grid_world(cfg: &ExperimentConfig) -> Result<GridWorld<f64>> {
    let g = &cfg.grid;
    let mut spec = GridSpec::new(g.width, g.c_p, g.gamma);
    if let Some(path) = cfg.reward_table_path() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| perfoptrl_core::Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let (width, table) = parse_reward_table(&text)?;
        if width != g.width {
            return Err(perfoptrl_core::Error::Config(format!(
                "reward table is {width}×{width} but grid.width = {}",
                g.width
            )));
        }
        spec.base_rewards = table;
    }
    build_grid(&spec)
}

pub fn retrain_config(cfg: &ExperimentConfig) -> RetrainConfig<f64> {
    let r = &cfg.retrain;
    RetrainConfig {
        rounds: r.rounds,
        iterations: r.iterations,
        samples: r.samples,
        epsilon: cfg.contamination.epsilon,
        lambda: r.lambda,
        mixing: r.mixing,
        h_max: r.h_max,
        estimator: match r.estimator {
            Estimator::Robust => GradientEstimator::Robust,
            Estimator::Naive => GradientEstimator::Naive,
        },
        alpha: r.alpha,
        b: r.b,
        c: r.c,
        evaluate_gap: r.evaluate_gap,
    }
}

pub struct RetrainSeed {
    pub rows: Vec<Row>,
    pub norm_dist: Vec<f64>,
    pub mc_error: Option<McError>,
}

/// Relative errors of the Monte-Carlo occupancy of the final policy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct McError {
    /// Against the infinite-horizon occupancy; includes the `γ^H` truncation bias.
    pub vs_exact: f64,
    /// Against the occupancy of the first `H` steps, which the rollouts estimate unbiasedly.
    pub vs_truncated: f64,
}

/// `Σ_{t<H} γ^t·Pr(s_t = s, a_t = a)` by forward propagation of the state distribution.
pub fn truncated_occupancy(pi: &Policy<f64>, mdp: &MdpModel<f64>, horizon: usize) -> Vector<f64> {
    let (ns, na) = (mdp.states(), mdp.actions());
    let mut mu = mdp.rho().as_slice().to_vec();
    let mut d = vec![0.0; ns * na];
    let mut weight = 1.0;
    for _ in 0..horizon {
        let mut next = vec![0.0; ns];
        for s in 0..ns {
            for a in 0..na {
                let mass = mu[s] * pi.prob(s, a);
                d[s * na + a] += weight * mass;
                for (s2, &p) in mdp.transition_row(s, a).iter().enumerate() {
                    next[s2] += mass * p;
                }
            }
        }
        mu = next;
        weight *= mdp.gamma();
    }
    Vector::from_fn(ns * na, |i| d[i])
}

pub fn run_retrain(cfg: &ExperimentConfig, grid: &GridWorld<f64>, seed: u64) -> Result<RetrainSeed> {
    let c = &cfg.contamination;
    let corruption = GridCorruption::with_sigma(c.z, c.sigma, c.kappa)?;
    let outcome = repeated_retraining(
        grid,
        &retrain_config(cfg),
        |s, rng| corrupt_transition(s, &corruption, grid, rng),
        seed,
    )?;
    let rows = outcome
        .rounds
        .iter()
        .map(|r| {
            vec![
                seed.into(),
                r.round.into(),
                r.norm_dist.into(),
                r.ret.into(),
                r.coverage_floor.into(),
                r.gap.into(),
            ]
        })
        .collect();
    let mc_error = if cfg.retrain.mc_trajectories > 0 {
        let (mdp, exact) = grid.deploy(&outcome.policy)?;
        let mut rng = substream(seed, 0, Stream::Rollout);
        let mc = mc_occupancy(&outcome.policy, &mdp, cfg.retrain.mc_trajectories, cfg.retrain.mc_horizon, &mut rng)?;
        let truncated = truncated_occupancy(&outcome.policy, &mdp, cfg.retrain.mc_horizon);
        Some(McError {
            vs_exact: mc.as_vector().distance(exact.as_vector())? / exact.as_vector().norm(),
            vs_truncated: mc.as_vector().distance(&truncated)? / truncated.norm(),
        })
    } else {
        None
    };
    Ok(RetrainSeed {
        rows,
        norm_dist: outcome.rounds.iter().map(|r| r.norm_dist).collect(),
        mc_error,
    })
}

// ---------------------------------------------------------------- minimax

/// `A = I`, `u_i = 0.2·(−½)^i`, `v_i = −0.3·(−½)^i`.
pub fn bilinear_fixture(dim: usize) -> Result<impl Objective<f64> + Clone> {
    let geo = |scale: f64| Vector::from_fn(dim, |i| scale * (-0.5f64).powi(i as i32));
    make_bilinear_objective(Matrix::identity(dim), geo(0.2), geo(-0.3))
}

/// `ζ_X,i = (−½)^i`, `ζ_Y,i = ¼ + ½i`, sign `+1`.
pub fn scc_fixture(dim: usize) -> Result<impl Objective<f64> + Clone> {
    make_scc_objective(
        Vector::from_fn(dim, |i| (-0.5f64).powi(i as i32)),
        Vector::from_fn(dim, |i| 0.25 + 0.5 * i as f64),
        1,
    )
}

/// Bias of norm `z` along `(1,…,1)/√dim` for both players.
pub fn uniform_bias(dim_x: usize, dim_y: usize, z: f64) -> ConstantBias<f64> {
    ConstantBias {
        x: Vector::filled(dim_x, z / (dim_x as f64).sqrt()),
        y: Vector::filled(dim_y, z / (dim_y as f64).sqrt()),
    }
}

fn minimax_trace(
    m: &MinimaxSection,
    objective: &dyn Objective<f64>,
    oracle: &mut dyn GradientOracle<f64>,
    dom: &dyn Domain<f64>,
) -> Result<SolverTrace<f64>> {
    match m.solver {
        Solver::Oftrl => {
            let solver = OftrlConfig {
                iterations: m.iterations,
                alpha: m.alpha,
                b: m.b,
                c: m.c,
                regularization: None,
                gap_every: m.gap_every,
            };
            solver.run(oracle, dom, dom, Some(objective))
        }
        Solver::Omda => {
            let s = objective.smoothness();
            let mut solver = OmdaConfig::new(m.iterations, s.xx.max(s.yy) + s.xy, m.spms_c);
            solver.rate_mode = match (m.eta, m.rate) {
                (Some(eta), _) => RateMode::Explicit(eta),
                (None, RateChoice::MaxSpeed) => RateMode::MaxSpeed,
                (None, RateChoice::MinFloor) => RateMode::MinFloor,
            };
            let mut trace = omda_solve(oracle, dom, dom, &solver, None)?;
            // last iterate quality, evaluated after the fact
            let last = trace.records.len();
            for r in &mut trace.records {
                if r.t % m.gap_every == 0 || r.t == last {
                    r.gap = Some(duality_gap(objective, dom, dom, &r.point.x, &r.point.y)?);
                }
            }
            Ok(trace)
        }
    }
}

pub fn run_minimax(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Row>> {
    let m = &cfg.minimax;
    match m.objective {
        ObjectiveKind::Bilinear => {
            let dom = BoxDomain::uniform(m.dim, -m.radius, m.radius)?;
            run_fixture(m, bilinear_fixture(m.dim)?, &dom, seed)
        }
        ObjectiveKind::Scc => run_fixture(m, scc_fixture(m.dim)?, &BallDomain::new(m.radius)?, seed),
    }
}

fn run_fixture<O>(m: &MinimaxSection, objective: O, dom: &dyn Domain<f64>, seed: u64) -> Result<Vec<Row>>
where
    O: Objective<f64> + Clone,
{
    let trace = match m.noise {
        NoiseKind::None | NoiseKind::Bias => {
            let z = if m.noise == NoiseKind::Bias { m.z } else { 0.0 };
            let mut oracle = NoisyOracle::new(objective.clone(), uniform_bias(m.dim, m.dim, z));
            minimax_trace(m, &objective, &mut oracle, dom)?
        }
        NoiseKind::Gaussian => {
            let mut rng = substream(seed, 0, Stream::Noise);
            let normal = Normal::new(0.0, m.z).map_err(|e| perfoptrl_core::Error::Config(e.to_string()))?;
            let noise = move |_t: usize, x: &Vector<f64>, y: &Vector<f64>| {
                let mut draw = |n: usize| Vector::from_fn(n, |_| normal.sample(&mut rng));
                (draw(x.len()), draw(y.len()))
            };
            let mut oracle = NoisyOracle::new(objective.clone(), noise);
            minimax_trace(m, &objective, &mut oracle, dom)?
        }
    };
    Ok(trace
        .records
        .iter()
        .map(|r| vec![seed.into(), r.t.into(), r.gap.into(), r.noise_x.into(), r.noise_y.into()])
        .collect())
}

// ---------------------------------------------------------------- estimator

fn simplex(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Full-support random MDP with rewards in `[−1, 1]` and a random initial distribution.
pub fn random_mdp(states: usize, actions: usize, gamma: f64, rng: &mut ChaCha8Rng) -> Result<MdpModel<f64>> {
    let mut p = Vec::with_capacity(states * actions * states);
    for _ in 0..states * actions {
        p.extend(simplex(states, rng));
    }
    let r = (0..states * actions).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rho = Vector::new(simplex(states, rng))?;
    MdpModel::new(states, actions, p, r, rho, gamma)
}

/// The fixed problem every estimator trial samples from.
pub struct EstimatorProblem {
    pub mdp: MdpModel<f64>,
    pub d_n: OccupancyMeasure<f64>,
    pub h: Vector<f64>,
    /// `E[gd] = r + γPh − h`, per state-action pair.
    pub truth: Vector<f64>,
    pub setting: EstimationSetting,
}

pub fn estimator_problem(cfg: &ExperimentConfig) -> Result<EstimatorProblem> {
    let e = &cfg.estimator;
    let mut rng = substream(e.mdp_seed, 0, Stream::Other(1));
    let mdp = random_mdp(e.states, e.actions, e.gamma, &mut rng)?;
    let d_n = exact_occupancy(&Policy::uniform(e.states, e.actions), &mdp)?;
    let h = Vector::from_fn(e.states, |_| rng.random_range(-e.h_max..e.h_max));
    let na = e.actions;
    let truth = Vector::from_fn(e.states * na, |i| {
        let (s, a) = (i / na, i % na);
        let next: f64 = (0..e.states).map(|s2| mdp.transition(s, a, s2) * h[s2]).sum();
        mdp.reward(s, a) + e.gamma * next - h[s]
    });
    let setting = EstimationSetting {
        gamma: e.gamma,
        coverage: d_n.min_entry(),
        h_max: e.h_max,
        reward_bound: mdp.reward_bound(),
        states: e.states,
        actions: e.actions,
    };
    Ok(EstimatorProblem { mdp, d_n, h, truth, setting })
}

/// `d`-gradient samples of one batch; the same `⌊εm⌋` samples get their reward shifted by
/// each `magnitude` (the clean draw and the corrupted positions do not depend on it).
pub fn corrupted_gd_sets(
    problem: &EstimatorProblem,
    m: usize,
    epsilon: f64,
    magnitudes: &[f64],
    seed: u64,
    index: u64,
) -> Result<Vec<SampleSet<f64>>> {
    let mut data_rng = substream(seed, index, Stream::Dataset);
    let clean = perfoptrl_core::perf_mdp::sample_dataset(&problem.d_n, &problem.mdp, m, &mut data_rng)?;
    let gamma = problem.mdp.gamma();
    let dim = problem.truth.len();
    magnitudes
        .iter()
        .map(|&mag| {
            let mut batch = clean.clone();
            let mut rng = substream(seed, index, Stream::Contamination);
            let mut spec = CorruptionSpec::new(epsilon, |s: &TransitionSample<f64>, _: &mut ChaCha8Rng| TransitionSample {
                r: s.r + mag,
                ..*s
            })?;
            contaminate(&mut batch, &mut spec, &mut rng);
            let samples = batch
                .iter()
                .map(|s| gd_sample(s, &problem.h, &problem.d_n, gamma))
                .collect::<Result<Vec<_>>>()?;
            SampleSet::new(dim, samples)
        })
        .collect()
}

pub fn run_estimator(cfg: &ExperimentConfig, problem: &EstimatorProblem, seed: u64) -> Result<Vec<Row>> {
    let e = &cfg.estimator;
    let mut rows = Vec::new();
    for (k, &eps) in e.epsilons.iter().enumerate() {
        let (_, e2) = estimation_error_bounds(e.samples, eps, e.delta, &problem.setting)?;
        let sets = corrupted_gd_sets(problem, e.samples, eps, &e.magnitudes, seed, k as u64)?;
        for (set, &mag) in sets.iter().zip(&e.magnitudes) {
            let err = |est: Vector<f64>| est.distance(&problem.truth);
            rows.push(vec![
                seed.into(),
                eps.into(),
                mag.into(),
                err(coordinate_robust_mean(set, eps)?)?.into(),
                err(naive_mean(set)?)?.into(),
                e2.into(),
            ]);
        }
    }
    Ok(rows)
}
