//! Policy-dependent MDPs: occupancy measures, the regularized Lagrangian and its sample
//! gradients, and robust repeated retraining.

mod gradients;
mod lagrangian;
mod model;
mod occupancy;
mod retrain;
mod saddle;

pub use gradients::{
    gd_sample, gh_sample, robust_lagrangian_gradients, sample_dataset, GradientContext,
    GradientEstimator, LagrangianOracle,
};
pub use lagrangian::{grad_d, grad_h, lagrangian_value, LagrangianObjective, LagrangianParams};
pub use model::{MdpModel, OccupancyMeasure, Policy, TransitionSample};
pub use occupancy::{coverage_floor, exact_occupancy, mc_occupancy, policy_from_occupancy, return_of};
pub use retrain::{repeated_retraining, PerformativeEnvironment, RetrainConfig, RetrainOutcome, RoundRecord};
pub use saddle::{solve_saddle, SaddleSolution};
