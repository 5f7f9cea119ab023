use crate::domains::Vector;
use crate::error::{check_dim, Error, Result};
use crate::perf_mdp::{exact_occupancy, MdpModel, OccupancyMeasure, PerformativeEnvironment, Policy};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Left = 0,
    Right = 1,
    Up = 2,
    Down = 3,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Left, Action::Right, Action::Up, Action::Down];

    /// Cell reached from `(i, j)`; moves off the grid stay put.
    pub fn apply(self, i: usize, j: usize, width: usize) -> (usize, usize) {
        match self {
            Action::Left => (i, j.saturating_sub(1)),
            Action::Right => (i, (j + 1).min(width - 1)),
            Action::Up => (i.saturating_sub(1), j),
            Action::Down => ((i + 1).min(width - 1), j),
        }
    }
}

/// Gridworld description: base rewards `R[i][j]` (row-major), performativity `c_p`,
/// discount and initial distribution (uniform when absent).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    pub width: usize,
    pub base_rewards: Vec<T>,
    pub c_p: T,
    pub gamma: T,
    pub rho: Option<Vector<T>>,
}

impl<T: Scalar> GridSpec<T> {
    /// `W×W` grid with the default reward table.
    pub fn new(width: usize, c_p: T, gamma: T) -> Self {
        Self {
            width,
            base_rewards: default_reward_table(width),
            c_p,
            gamma,
            rho: None,
        }
    }

    /// `max |R[i][j]|`.
    pub fn reward_bound(&self) -> T {
        self.base_rewards.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }
}

/// Goal reward 1 in the bottom-right cell, −0.01 everywhere else.
pub fn default_reward_table<T: Scalar>(width: usize) -> Vec<T> {
    let cells = width * width;
    (0..cells)
        .map(|s| if s + 1 == cells { T::one() } else { T::of(-0.01) })
        .collect()
}

/// Parses `W` lines of `W` whitespace-separated reals; blank lines and `#` comments are
/// ignored.
pub fn parse_reward_table<T: Scalar>(text: &str) -> Result<(usize, Vec<T>)> {
    let mut rows: Vec<(usize, Vec<T>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::of)
                    .ok_or_else(|| Error::Config(format!("line {}: invalid number {tok:?}", n + 1)))
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push((n + 1, row));
    }
    let width = rows.len();
    if width < 2 {
        return Err(Error::Config(format!("reward table needs at least 2 rows, found {width}")));
    }
    let mut table = Vec::with_capacity(width * width);
    for (line, row) in rows {
        if row.len() != width {
            return Err(Error::Config(format!(
                "line {line}: expected {width} values, found {}",
                row.len()
            )));
        }
        table.extend(row);
    }
    Ok((width, table))
}

/// The gridworld dynamics with its base rewards; rewards respond to the deployed policy.
#[derive(Debug, Clone)]
pub struct GridWorld<T> {
    spec: GridSpec<T>,
    base: MdpModel<T>,
}

/// Deterministic `W×W` grid, `S = W²`, `A = 4`, state `s = i·W + j`.
pub fn build_grid<T: Scalar>(spec: &GridSpec<T>) -> Result<GridWorld<T>> {
    let w = spec.width;
    if w < 2 {
        return Err(Error::Config(format!("grid width must be at least 2, got {w}")));
    }
    check_dim(w * w, spec.base_rewards.len())?;
    if !spec.c_p.is_finite() {
        return Err(Error::NonFinite("performativity coefficient"));
    }
    let ns = w * w;
    let na = Action::ALL.len();
    let mut transitions = vec![T::zero(); ns * na * ns];
    let mut rewards = Vec::with_capacity(ns * na);
    for s in 0..ns {
        let (i, j) = (s / w, s % w);
        for (a, act) in Action::ALL.iter().enumerate() {
            let (ni, nj) = act.apply(i, j, w);
            transitions[(s * na + a) * ns + ni * w + nj] = T::one();
            rewards.push(spec.base_rewards[s]);
        }
    }
    let rho = spec
        .rho
        .clone()
        .unwrap_or_else(|| Vector::filled(ns, T::one() / T::of_usize(ns)));
    let base = MdpModel::new(ns, na, transitions, rewards, rho, spec.gamma)?;
    Ok(GridWorld { spec: spec.clone(), base })
}

/// `r_n(s, a) = R[i][j] − c_p·Σ_a d_n(s, a)` on the grid dynamics.
pub fn performative_mdp<T: Scalar>(grid: &GridWorld<T>, d_n: &OccupancyMeasure<T>) -> Result<MdpModel<T>> {
    let (ns, na) = (grid.base.states(), grid.base.actions());
    check_dim(ns, d_n.states())?;
    check_dim(na, d_n.actions())?;
    let marginal = d_n.state_marginal();
    let rewards = (0..ns * na)
        .map(|i| grid.spec.base_rewards[i / na] - grid.spec.c_p * marginal[i / na])
        .collect();
    grid.base.with_rewards(rewards)
}

impl<T: Scalar> GridWorld<T> {
    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    /// Dynamics with the base rewards.
    pub fn base_model(&self) -> &MdpModel<T> {
        &self.base
    }

    /// Grid coordinates of state `s`.
    pub fn cell(&self, s: usize) -> (usize, usize) {
        (s / self.spec.width, s % self.spec.width)
    }

    pub fn manhattan(&self, a: usize, b: usize) -> usize {
        let (ai, aj) = self.cell(a);
        let (bi, bj) = self.cell(b);
        ai.abs_diff(bi) + aj.abs_diff(bj)
    }
}

impl<T: Scalar> PerformativeEnvironment<T> for GridWorld<T> {
    fn states(&self) -> usize {
        self.base.states()
    }

    fn actions(&self) -> usize {
        self.base.actions()
    }

    fn deploy(&self, policy: &Policy<T>) -> Result<(MdpModel<T>, OccupancyMeasure<T>)> {
        // Occupancy depends on dynamics and policy only, so the base rewards suffice here.
        let occ = exact_occupancy(policy, &self.base)?;
        Ok((performative_mdp(self, &occ)?, occ))
    }
}
