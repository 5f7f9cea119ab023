use crate::domains::Vector;
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

const SIMPLEX_TOL: f64 = 1e-12;

/// A finite discounted MDP `(S, A, P, r, ρ, γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpModel<T> {
    states: usize,
    actions: usize,
    /// `P[s][a][s′]` flattened as `(s·A + a)·S + s′`.
    transitions: Vec<T>,
    /// `r[s][a]` flattened as `s·A + a`.
    rewards: Vec<T>,
    rho: Vector<T>,
    gamma: T,
}

fn check_distribution<T: Scalar>(row: &[T], what: &str) -> Result<()> {
    if row.iter().any(|&p| !(p >= T::zero() && p <= T::one())) {
        return Err(Error::Domain(format!("{what}: entries must lie in [0, 1]")));
    }
    let total: f64 = row.iter().map(|p| p.as_f64()).sum();
    if (total - 1.0).abs() > SIMPLEX_TOL.max(row.len() as f64 * T::epsilon().as_f64()) {
        return Err(Error::Domain(format!("{what}: sums to {total}, expected 1")));
    }
    Ok(())
}

impl<T: Scalar> MdpModel<T> {
    pub fn new(
        states: usize,
        actions: usize,
        transitions: Vec<T>,
        rewards: Vec<T>,
        rho: Vector<T>,
        gamma: T,
    ) -> Result<Self> {
        if states == 0 || actions == 0 {
            return Err(Error::Domain("MDP needs at least one state and one action".into()));
        }
        check_dim(states * actions * states, transitions.len())?;
        check_dim(states * actions, rewards.len())?;
        check_dim(states, rho.len())?;
        if !(gamma >= T::zero() && gamma < T::one()) {
            return Err(Error::Domain(format!("discount must lie in [0, 1), got {gamma}")));
        }
        if rewards.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite("rewards"));
        }
        for sa in 0..states * actions {
            check_distribution(
                &transitions[sa * states..(sa + 1) * states],
                &format!("transition row ({}, {})", sa / actions, sa % actions),
            )?;
        }
        check_distribution(rho.as_slice(), "initial distribution")?;
        Ok(Self {
            states,
            actions,
            transitions,
            rewards,
            rho,
            gamma,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn rho(&self) -> &Vector<T> {
        &self.rho
    }

    pub fn index(&self, s: usize, a: usize) -> usize {
        s * self.actions + a
    }

    pub fn transition(&self, s: usize, a: usize, next: usize) -> T {
        self.transitions[self.index(s, a) * self.states + next]
    }

    /// `P(·|s, a)`.
    pub fn transition_row(&self, s: usize, a: usize) -> &[T] {
        let base = self.index(s, a) * self.states;
        &self.transitions[base..base + self.states]
    }

    pub fn reward(&self, s: usize, a: usize) -> T {
        self.rewards[self.index(s, a)]
    }

    pub fn rewards(&self) -> &[T] {
        &self.rewards
    }

    pub fn reward_vector(&self) -> Vector<T> {
        Vector::from_vec_unchecked(self.rewards.clone())
    }

    /// `max |r(s, a)|`.
    pub fn reward_bound(&self) -> T {
        self.rewards.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }

    /// Same dynamics with a new reward table.
    pub fn with_rewards(&self, rewards: Vec<T>) -> Result<Self> {
        check_dim(self.states * self.actions, rewards.len())?;
        if rewards.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite("rewards"));
        }
        Ok(Self {
            rewards,
            ..self.clone()
        })
    }
}

/// Stochastic policy `π(a|s)`, stored row-major by state.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy<T> {
    states: usize,
    actions: usize,
    probs: Vec<T>,
}

impl<T: Scalar> Policy<T> {
    pub fn new(states: usize, actions: usize, probs: Vec<T>) -> Result<Self> {
        check_dim(states * actions, probs.len())?;
        for s in 0..states {
            check_distribution(&probs[s * actions..(s + 1) * actions], &format!("policy row {s}"))?;
        }
        Ok(Self { states, actions, probs })
    }

    pub fn uniform(states: usize, actions: usize) -> Self {
        let p = T::one() / T::of_usize(actions);
        Self {
            states,
            actions,
            probs: vec![p; states * actions],
        }
    }

    pub(crate) fn from_rows_unchecked(states: usize, actions: usize, probs: Vec<T>) -> Self {
        Self { states, actions, probs }
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn prob(&self, s: usize, a: usize) -> T {
        self.probs[s * self.actions + a]
    }

    pub fn row(&self, s: usize) -> &[T] {
        &self.probs[s * self.actions..(s + 1) * self.actions]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.probs
    }
}

/// State-action occupancy `d(s, a)`, flattened as `s·A + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMeasure<T> {
    states: usize,
    actions: usize,
    d: Vector<T>,
}

impl<T: Scalar> OccupancyMeasure<T> {
    pub fn new(states: usize, actions: usize, d: Vector<T>) -> Result<Self> {
        check_dim(states * actions, d.len())?;
        Ok(Self { states, actions, d })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn get(&self, s: usize, a: usize) -> T {
        self.d[s * self.actions + a]
    }

    pub fn as_vector(&self) -> &Vector<T> {
        &self.d
    }

    pub fn into_vector(self) -> Vector<T> {
        self.d
    }

    pub fn total(&self) -> T {
        self.d.iter().copied().sum()
    }

    /// `Σ_a d(s, a)` per state.
    pub fn state_marginal(&self) -> Vector<T> {
        Vector::from_fn(self.states, |s| (0..self.actions).map(|a| self.get(s, a)).sum())
    }

    pub fn min_entry(&self) -> T {
        self.d.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    /// Largest per-state violation of `Σ_a d(s,a) = ρ(s) + γ·Σ_{s′,a} d(s′,a)·P(s|s′,a)`.
    pub fn flow_residual(&self, mdp: &MdpModel<T>) -> Result<T> {
        check_dim(mdp.states(), self.states)?;
        check_dim(mdp.actions(), self.actions)?;
        let mut inflow: Vec<T> = mdp.rho().iter().copied().collect();
        for s in 0..self.states {
            for a in 0..self.actions {
                let w = mdp.gamma() * self.get(s, a);
                if w == T::zero() {
                    continue;
                }
                for (next, &p) in mdp.transition_row(s, a).iter().enumerate() {
                    inflow[next] = inflow[next] + w * p;
                }
            }
        }
        let marginal = self.state_marginal();
        Ok(inflow
            .iter()
            .zip(marginal.iter())
            .fold(T::zero(), |m, (&i, &o)| m.max((i - o).abs())))
    }
}

/// One logged transition `(s, a, s′, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSample<T> {
    pub s: usize,
    pub a: usize,
    pub s_next: usize,
    pub r: T,
}
