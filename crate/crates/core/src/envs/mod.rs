//! The policy-dependent gridworld and its two-channel corruption adversary.

mod corruption;
mod grid;

pub use corruption::{corrupt_transition, GridCorruption};
pub use grid::{
    build_grid, default_reward_table, parse_reward_table, performative_mdp, Action, GridSpec,
    GridWorld,
};
