//! Lower-bound attainment: several objectives that present one and the same noisy oracle.
//!
//! A deterministic solver cannot tell the scenarios apart, so it returns the same point for
//! all of them, and that point must be far from at least one true saddle.

use perfoptrl_core::domains::{
    make_bilinear_objective, make_scc_objective, BallDomain, GradientEstimate, GradientOracle,
    Matrix, Objective, Smoothness, Vector,
};
use perfoptrl_core::minimax::{duality_gap, Pair, SaddleSolver, SolverKind};
use perfoptrl_core::{Error, Result};
use serde::Serialize;

/// What every bilinear (resp. strongly convex-concave) scenario shows the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Presented {
    /// `g_x = y`, `g_y = x`.
    Bilinear,
    /// `g_x = x`, `g_y = −y`.
    Scc,
}

struct PresentedOracle {
    kind: Presented,
    dim: usize,
}

impl GradientOracle<f64> for PresentedOracle {
    fn dims(&self) -> (usize, usize) {
        (self.dim, self.dim)
    }

    fn smoothness(&self) -> Smoothness<f64> {
        match self.kind {
            Presented::Bilinear => Smoothness { xx: 0.0, xy: 1.0, yy: 0.0 },
            Presented::Scc => Smoothness { xx: 1.0, xy: 0.0, yy: 1.0 },
        }
    }

    fn query(&mut self, _t: usize, x: &Vector<f64>, y: &Vector<f64>) -> Result<GradientEstimate<f64>> {
        let (grad_x, grad_y) = match self.kind {
            Presented::Bilinear => (y.clone(), x.clone()),
            Presented::Scc => (x.clone(), -y),
        };
        Ok(GradientEstimate { grad_x, grad_y, error_x: None, error_y: None })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub scenario: &'static str,
    /// Distance of the solver output from this scenario's saddle point.
    pub distance: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub solver: &'static str,
    pub z_x: f64,
    pub z_y: f64,
    pub radius: f64,
    pub scenarios: Vec<ScenarioOutcome>,
    pub max_distance: f64,
    pub distance_threshold: f64,
    pub max_gap: f64,
    pub gap_threshold: f64,
    pub deterministic: bool,
    pub passed: bool,
}

pub fn solver_name(kind: SolverKind) -> &'static str {
    match kind {
        SolverKind::Oftrl => "oftrl",
        SolverKind::Omda => "omda",
    }
}

fn run_twice(solver: &dyn SaddleSolver<f64>, kind: Presented, dim: usize, dom: &BallDomain<f64>) -> Result<(Pair<f64>, bool)> {
    let run = || {
        let mut oracle = PresentedOracle { kind, dim };
        solver.run(&mut oracle, dom, dom, None).map(|t| t.solution)
    };
    let first = run()?;
    let second = run()?;
    let same = first.bitwise_eq(&second);
    Ok((first, same))
}

/// Runs `solver` against the three bilinear scenarios (noise `−ζ`, `+ζ`, none) and the two
/// strongly convex-concave ones, with `ζ_X = Z_X·(1,…,1)/√dim` (same for `Y`) on balls of
/// radius `radius`.
///
/// Passes when some scenario puts the output at distance `≥ (Z_X+Z_Y)/√2` from its saddle,
/// some scenario has gap `≥ ¼(Z_Y·D + Z_X·D)`, and repeated runs agree bit for bit.
pub fn lower_bound_suite(
    solver: &dyn SaddleSolver<f64>,
    dim: usize,
    z_x: f64,
    z_y: f64,
    radius: f64,
) -> Result<LowerBoundReport> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(z_x >= 0.0 && z_y >= 0.0 && z_x <= radius / 2.0 && z_y <= radius / 2.0) {
        return Err(Error::Domain(format!("noise levels ({z_x}, {z_y}) must lie in [0, D/2] with D = {radius}")));
    }
    let dom = BallDomain::new(radius)?;
    let unit = 1.0 / (dim as f64).sqrt();
    let zeta_x = Vector::filled(dim, z_x * unit);
    let zeta_y = Vector::filled(dim, z_y * unit);

    let (p_bil, det_bil) = run_twice(solver, Presented::Bilinear, dim, &dom)?;
    let (p_scc, det_scc) = run_twice(solver, Presented::Scc, dim, &dom)?;

    let eye = Matrix::identity(dim);
    let f1 = make_bilinear_objective(eye.clone(), zeta_x.clone(), zeta_y.clone())?;
    let f2 = make_bilinear_objective(eye.clone(), -&zeta_x, -&zeta_y)?;
    let f3 = make_bilinear_objective(eye, Vector::zeros(dim), Vector::zeros(dim))?;
    let g_plus = make_scc_objective(zeta_x.clone(), zeta_y.clone(), 1)?;
    let g_minus = make_scc_objective(zeta_x.clone(), zeta_y.clone(), -1)?;

    let scenarios: [(&'static str, &dyn Objective<f64>, Pair<f64>, &Pair<f64>); 5] = [
        ("bilinear_minus", &f1, Pair::new(-&zeta_y, -&zeta_x), &p_bil),
        ("bilinear_plus", &f2, Pair::new(zeta_y.clone(), zeta_x.clone()), &p_bil),
        ("bilinear_clean", &f3, Pair::zeros((dim, dim)), &p_bil),
        ("scc_plus", &g_plus, {
            let (x, y) = g_plus.saddle_point();
            Pair::new(x, y)
        }, &p_scc),
        ("scc_minus", &g_minus, {
            let (x, y) = g_minus.saddle_point();
            Pair::new(x, y)
        }, &p_scc),
    ];

    let mut outcomes = Vec::with_capacity(scenarios.len());
    for (name, objective, saddle, point) in scenarios {
        outcomes.push(ScenarioOutcome {
            scenario: name,
            distance: point.distance(&saddle)?,
            gap: duality_gap(objective, &dom, &dom, &point.x, &point.y)?,
        });
    }
    let max_distance = outcomes.iter().map(|o| o.distance).fold(f64::NEG_INFINITY, f64::max);
    let max_gap = outcomes.iter().map(|o| o.gap).fold(f64::NEG_INFINITY, f64::max);
    let distance_threshold = (z_x + z_y) / std::f64::consts::SQRT_2;
    let gap_threshold = 0.25 * z_y * radius + 0.25 * z_x * radius;
    let deterministic = det_bil && det_scc;
    Ok(LowerBoundReport {
        solver: solver_name(solver.kind()),
        z_x,
        z_y,
        radius,
        scenarios: outcomes,
        max_distance,
        distance_threshold,
        max_gap,
        gap_threshold,
        deterministic,
        passed: deterministic && max_distance >= distance_threshold - 1e-9 && max_gap >= gap_threshold - 1e-9,
    })
}
