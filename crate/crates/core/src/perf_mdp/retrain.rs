use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::minimax::OftrlConfig;
use crate::rng::{substream, Stream};
use crate::robust_stats::{contaminate, CorruptionSpec};
use crate::scalar::Scalar;

use super::gradients::{sample_dataset, GradientContext, GradientEstimator};
use super::lagrangian::LagrangianParams;
use super::model::{MdpModel, OccupancyMeasure, Policy, TransitionSample};
use super::occupancy::{policy_from_occupancy, return_of};
use super::saddle::solve_saddle;
use crate::domains::Vector;

/// An environment whose MDP responds to the deployed policy.
pub trait PerformativeEnvironment<T: Scalar>: Send + Sync {
    fn states(&self) -> usize;

    fn actions(&self) -> usize;

    /// `M(π)` together with the occupancy of `π` in it.
    fn deploy(&self, policy: &Policy<T>) -> Result<(MdpModel<T>, OccupancyMeasure<T>)>;
}

/// Settings of one repeated-retraining run.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrainConfig<T> {
    /// Rounds `N`.
    pub rounds: usize,
    /// OFTRL iterations `T` per round.
    pub iterations: usize,
    /// Samples `m` per round.
    pub samples: usize,
    pub epsilon: f64,
    pub lambda: T,
    /// Constant `c` added to `d̄` before extracting the next policy.
    pub mixing: T,
    /// Multiplier bound; `2R/(1−γ)` of the current round's model when absent.
    pub h_max: Option<T>,
    pub estimator: GradientEstimator,
    pub alpha: T,
    pub b: T,
    pub c: T,
    /// Evaluate the Lagrangian duality gap of every round's saddle output.
    pub evaluate_gap: bool,
}

impl<T: Scalar> RetrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.rounds == 0 || self.iterations == 0 {
            return bad("rounds and iterations must be positive".into());
        }
        if self.samples < 2 * self.iterations {
            return bad(format!(
                "{} samples cannot fill {} batches",
                self.samples,
                2 * self.iterations
            ));
        }
        if !(0.0..0.5).contains(&self.epsilon) {
            return bad(format!("corruption level must lie in [0, 0.5), got {}", self.epsilon));
        }
        if !(self.mixing > T::zero()) {
            return bad(format!("mixing constant must be positive, got {}", self.mixing));
        }
        if let Some(h) = self.h_max {
            if !(h > T::zero()) {
                return bad(format!("h_max must be positive, got {h}"));
            }
        }
        self.oftrl().validate()
    }

    fn oftrl(&self) -> OftrlConfig<T> {
        OftrlConfig {
            iterations: self.iterations,
            alpha: self.alpha,
            b: self.b,
            c: self.c,
            regularization: None,
            gap_every: 1,
        }
    }
}

/// Diagnostics of one retraining round `n`: the step from `π_n` to `π_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord<T> {
    pub round: usize,
    /// `‖d_{n+1} − d_n‖₂ / ‖d_n‖₂` between deployed occupancies.
    pub norm_dist: T,
    /// Return of `π_{n+1}` in `M(π_{n+1})`.
    pub ret: T,
    /// `min_{s,a} d_n(s, a)`: coverage of this round's data.
    pub coverage_floor: T,
    pub gap: Option<T>,
    pub h_max: T,
    pub corrupted: usize,
}

#[derive(Debug, Clone)]
pub struct RetrainOutcome<T> {
    pub d_tilde: OccupancyMeasure<T>,
    pub policy: Policy<T>,
    pub occupancy: OccupancyMeasure<T>,
    pub rounds: Vec<RoundRecord<T>>,
}

/// Robust repeated retraining from the uniform policy.
///
/// Each round samples `m` transitions from `(1−γ)d_n` (stream `Dataset`), splits them into
/// `2T` batches, corrupts `⌊ε·m̃⌋` samples of every batch through `adversary` (stream
/// `Contamination`), solves the empirical saddle problem and mixes `c` into `d̄`.
pub fn repeated_retraining<T, E, F>(
    env: &E,
    cfg: &RetrainConfig<T>,
    mut adversary: F,
    seed: u64,
) -> Result<RetrainOutcome<T>>
where
    T: Scalar,
    E: PerformativeEnvironment<T> + ?Sized,
    F: FnMut(&TransitionSample<T>, &mut ChaCha8Rng) -> TransitionSample<T>,
{
    cfg.validate()?;
    let (ns, na) = (env.states(), env.actions());
    let mut policy = Policy::uniform(ns, na);
    let (mut mdp, mut occ) = env.deploy(&policy)?;
    let oftrl = cfg.oftrl();
    let batch = cfg.samples / (2 * cfg.iterations);
    let mut rounds = Vec::with_capacity(cfg.rounds);
    let mut d_tilde = occ.clone();

    for n in 1..=cfg.rounds {
        let gamma = mdp.gamma();
        let h_max = cfg.h_max.unwrap_or_else(|| {
            T::of(2.0) * mdp.reward_bound().max(T::epsilon()) / (T::one() - gamma)
        });
        let params = LagrangianParams::new(&mdp, cfg.lambda, h_max)?;

        let mut data_rng = substream(seed, n as u64, Stream::Dataset);
        let mut dataset = sample_dataset(&occ, &mdp, cfg.samples, &mut data_rng)?;
        let mut corrupted = 0;
        if cfg.epsilon > 0.0 {
            let mut adv_rng = substream(seed, n as u64, Stream::Contamination);
            let mut spec = CorruptionSpec::new(cfg.epsilon, |s: &TransitionSample<T>, r: &mut ChaCha8Rng| {
                adversary(s, r)
            })?;
            for chunk in dataset.chunks_exact_mut(batch).take(2 * cfg.iterations) {
                let mask = contaminate(chunk, &mut spec, &mut adv_rng);
                corrupted += mask.iter().filter(|&&m| m).count();
            }
        }

        let ctx = GradientContext {
            mdp: &mdp,
            d_n: &occ,
            params: &params,
            epsilon: cfg.epsilon,
            estimator: cfg.estimator,
        };
        let sol = solve_saddle(&ctx, &dataset, &oftrl, cfg.evaluate_gap)?;
        let mixed = Vector::from_fn(ns * na, |i| sol.d_bar[i] + cfg.mixing);
        d_tilde = OccupancyMeasure::new(ns, na, mixed)?;
        let next_policy = policy_from_occupancy(&d_tilde)?;
        let (next_mdp, next_occ) = env.deploy(&next_policy)?;

        let norm_dist = next_occ.as_vector().distance(occ.as_vector())? / occ.as_vector().norm();
        rounds.push(RoundRecord {
            round: n,
            norm_dist,
            ret: return_of(&next_occ, next_mdp.rewards())?,
            coverage_floor: occ.min_entry(),
            gap: sol.gap,
            h_max,
            corrupted,
        });
        policy = next_policy;
        mdp = next_mdp;
        occ = next_occ;
    }
    Ok(RetrainOutcome {
        d_tilde,
        policy,
        occupancy: occ,
        rounds,
    })
}
