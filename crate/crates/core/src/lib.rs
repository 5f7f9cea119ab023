//! Saddle-point solvers with corrupted gradients, robust mean estimation, and performative
//! reinforcement learning on a Lagrangian formulation.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! `f64`, which the experiment harness uses throughout.

pub mod domains;
pub mod envs;
pub mod error;
pub mod minimax;
pub mod perf_mdp;
pub mod robust_stats;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type RealVector = domains::Vector<f64>;
pub type RealMatrix = domains::Matrix<f64>;
pub type RealBox = domains::BoxDomain<f64>;
pub type RealBall = domains::BallDomain<f64>;
pub type RealPair = minimax::Pair<f64>;
pub type RealTrace = minimax::SolverTrace<f64>;
