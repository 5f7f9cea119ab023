//! Vectors, convex sets with projections, and the objective/oracle contracts shared by
//! the solvers.

mod matrix;
mod objective;
mod oracle;
mod sets;
mod vector;

pub use matrix::Matrix;
pub use objective::{
    make_bilinear_objective, make_scc_objective, BilinearObjective, Objective, SccObjective,
    Smoothness,
};
pub use oracle::{
    ConstantBias, GradientEstimate, GradientOracle, NoisePolicy, NoisyOracle, NoisyQuery,
    ZeroNoise,
};
pub use sets::{project_ball, project_box, BallDomain, BoxDomain, Domain};
pub use vector::Vector;
