use std::time::Instant;

use crate::domains::{Domain, GradientOracle, Objective, Smoothness, Vector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::gap::duality_gap;
use super::trace::{IterationRecord, Pair, SolverKind, SolverTrace};

/// Settings for alternating optimistic FTRL with quadratic regularizers `(λ/2)‖·‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct OftrlConfig<T> {
    pub iterations: usize,
    pub alpha: T,
    pub b: T,
    pub c: T,
    /// Explicit `(λ_X, λ_Y)`; otherwise derived from the oracle's smoothness.
    pub regularization: Option<(T, T)>,
    /// Evaluate the duality gap of the running average every this many iterations
    /// (and always at the last one), when an evaluator is supplied.
    pub gap_every: usize,
}

impl<T: Scalar> Default for OftrlConfig<T> {
    fn default() -> Self {
        Self {
            iterations: 1000,
            alpha: T::one(),
            b: T::of(0.1),
            c: T::of(0.1),
            regularization: None,
            gap_every: 10,
        }
    }
}

impl<T: Scalar> OftrlConfig<T> {
    pub fn with_iterations(iterations: usize) -> Self {
        Self {
            iterations,
            ..Self::default()
        }
    }

    /// `(λ_X, λ_Y) = 3·(L_XX + L_XY·α + b, L_YY + L_XY/α + c)` unless overridden.
    pub fn regularization_for(&self, s: &Smoothness<T>) -> Result<(T, T)> {
        self.validate()?;
        let three = T::of(3.0);
        let (lx, ly) = self.regularization.unwrap_or((
            three * (s.xx + s.xy * self.alpha + self.b),
            three * (s.yy + s.xy / self.alpha + self.c),
        ));
        if !(lx > T::zero() && ly > T::zero() && lx.is_finite() && ly.is_finite()) {
            return Err(Error::Config(format!(
                "regularization ({lx}, {ly}) must be positive and finite"
            )));
        }
        Ok((lx, ly))
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("OFTRL needs at least one iteration".into()));
        }
        for (name, v) in [("alpha", self.alpha), ("b", self.b), ("c", self.c)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.gap_every == 0 {
            return Err(Error::Config("gap_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// One optimistic-FTRL play: `argmin_x (λ/2)‖x‖² + ⟨prediction + history_sum, x⟩` over `dom`,
/// i.e. the projection of `−(history_sum + prediction)/λ`.
pub fn oftrl_player_step<T: Scalar>(
    history_sum: &Vector<T>,
    prediction: &Vector<T>,
    lambda: T,
    dom: &dyn Domain<T>,
) -> Result<Vector<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::Config(format!("regularization must be positive, got {lambda}")));
    }
    let scale = -T::one() / lambda;
    let target = history_sum.zip_map(prediction, |h, p| (h + p) * scale)?;
    dom.project(&target)
}

/// Alternating optimistic FTRL between a min player over `dom_x` (losses `ĝ_x`) and a max
/// player over `dom_y` (losses `−ĝ_y`), each predicting its previous loss.
///
/// Returns the averaged pair in `trace.solution`. When `evaluator` is given, the duality gap
/// of the running average is recorded every `cfg.gap_every` iterations and at `T`.
pub fn oftrl_solve<T, O>(
    oracle: &mut O,
    dom_x: &dyn Domain<T>,
    dom_y: &dyn Domain<T>,
    cfg: &OftrlConfig<T>,
    evaluator: Option<&dyn Objective<T>>,
) -> Result<SolverTrace<T>>
where
    T: Scalar,
    O: GradientOracle<T> + ?Sized,
{
    let (lambda_x, lambda_y) = cfg.regularization_for(&oracle.smoothness())?;
    let (nx, ny) = oracle.dims();
    let start = Instant::now();

    let mut sum_gx = Vector::zeros(nx);
    let mut sum_gy = Vector::zeros(ny);
    let mut last_gx = Vector::zeros(nx);
    let mut last_gy = Vector::zeros(ny);
    let mut sum_x = Vector::zeros(nx);
    let mut sum_y = Vector::zeros(ny);
    let mut records = Vec::with_capacity(cfg.iterations);
    let mut initial = None;

    for t in 1..=cfg.iterations {
        let x = oftrl_player_step(&sum_gx, &last_gx, lambda_x, dom_x)?;
        let y = oftrl_player_step(&sum_gy, &last_gy, lambda_y, dom_y)?;
        let est = oracle
            .query(t, &x, &y)
            .and_then(|e| {
                crate::error::check_dim(nx, e.grad_x.len())?;
                crate::error::check_dim(ny, e.grad_y.len())?;
                if e.grad_x.is_finite() && e.grad_y.is_finite() {
                    Ok(e)
                } else {
                    Err(Error::NonFinite("gradient estimate"))
                }
            })
            .map_err(|e| Error::Oracle {
                iteration: t,
                source: Box::new(e),
            })?;

        let loss_x = est.grad_x;
        let loss_y = -&est.grad_y;
        sum_gx.add_assign(&loss_x)?;
        sum_gy.add_assign(&loss_y)?;
        last_gx = loss_x;
        last_gy = loss_y;
        sum_x.add_assign(&x)?;
        sum_y.add_assign(&y)?;

        let gap = match evaluator {
            Some(f) if t % cfg.gap_every == 0 || t == cfg.iterations => {
                let inv = T::one() / T::of_usize(t);
                Some(duality_gap(f, dom_x, dom_y, &sum_x.scale(inv), &sum_y.scale(inv))?)
            }
            _ => None,
        };
        if initial.is_none() {
            initial = Some(Pair::new(x.clone(), y.clone()));
        }
        records.push(IterationRecord {
            t,
            point: Pair::new(x, y),
            gap,
            noise_x: est.error_x,
            noise_y: est.error_y,
            dist_sq: None,
            elapsed: start.elapsed(),
        });
    }

    let inv = T::one() / T::of_usize(cfg.iterations);
    let solution = Pair::new(
        sum_x.scale(inv).ensure_finite("averaged iterate")?,
        sum_y.scale(inv).ensure_finite("averaged iterate")?,
    );
    Ok(SolverTrace {
        kind: SolverKind::Oftrl,
        records,
        initial: initial.expect("at least one iteration"),
        solution,
        regularization: Some((lambda_x, lambda_y)),
        eta: None,
    })
}

/// Right-hand side of the OFTRL duality-gap guarantee after the first `t` iterations of
/// `trace`, at the best responses to the running average:
///
/// `[ψ_X(x) + ψ_Y(y) + ‖∇ₓf(x₁,y₁)‖²/λ_X + ‖∇_yf(x₁,y₁)‖²/λ_Y]/t
///   + (6D_X/t)·Σ‖ζ^X‖ + (6D_Y/t)·Σ‖ζ^Y‖`.
///
/// Noise terms are zero when the trace carries no noise norms.
pub fn oftrl_gap_bound<T: Scalar, O: Objective<T> + ?Sized>(
    objective: &O,
    dom_x: &dyn Domain<T>,
    dom_y: &dyn Domain<T>,
    trace: &SolverTrace<T>,
    t: usize,
) -> Result<T> {
    if t == 0 || t > trace.len() {
        return Err(Error::Config(format!("bound requested at t = {t} outside the trace")));
    }
    let (lx, ly) = trace
        .regularization
        .ok_or(Error::Config("trace has no regularization (not an OFTRL trace)".into()))?;
    let (nx, ny) = objective.dims();
    let mut sum_x = Vector::zeros(nx);
    let mut sum_y = Vector::zeros(ny);
    for r in &trace.records[..t] {
        sum_x.add_assign(&r.point.x)?;
        sum_y.add_assign(&r.point.y)?;
    }
    let inv = T::one() / T::of_usize(t);
    let x_bar = sum_x.scale(inv);
    let y_bar = sum_y.scale(inv);
    let x_best = objective
        .best_response_x(&y_bar, dom_x)
        .ok_or(Error::Unsupported("no best-response oracle for x"))??;
    let y_best = objective
        .best_response_y(&x_bar, dom_y)
        .ok_or(Error::Unsupported("no best-response oracle for y"))??;
    let half = T::of(0.5);
    let psi = half * lx * x_best.norm_sq() + half * ly * y_best.norm_sq();
    let first = &trace.initial;
    let gx1 = objective.grad_x(&first.x, &first.y)?.norm_sq() / lx;
    let gy1 = objective.grad_y(&first.x, &first.y)?.norm_sq() / ly;
    let (zx, zy) = trace.noise_sums(t).unwrap_or((T::zero(), T::zero()));
    let six = T::of(6.0);
    Ok((psi + gx1 + gy1) * inv
        + six * dom_x.radius(nx) * zx * inv
        + six * dom_y.radius(ny) * zy * inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{make_bilinear_objective, BoxDomain, Matrix, NoisyOracle, ZeroNoise};

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::from_f64(x).unwrap()
    }

    #[test]
    fn player_step_examples() {
        let cube = BoxDomain::uniform(1, -1.0, 1.0).unwrap();
        assert_eq!(oftrl_player_step(&v(&[0.0]), &v(&[0.0]), 1.0, &cube).unwrap(), v(&[0.0]));
        assert_eq!(oftrl_player_step(&v(&[2.0]), &v(&[0.0]), 1.0, &cube).unwrap(), v(&[-1.0]));
        let got = oftrl_player_step(&v(&[0.3]), &v(&[0.1]), 2.0, &cube).unwrap();
        assert!((got[0] + 0.2).abs() < 1e-15);
        assert!(matches!(
            oftrl_player_step(&v(&[0.0]), &v(&[0.0]), 0.0, &cube),
            Err(Error::Config(_))
        ));
        // Off-center box: the zero loss plays the projection of the origin.
        let shifted = BoxDomain::uniform(1, 0.5, 2.0).unwrap();
        assert_eq!(oftrl_player_step(&v(&[0.0]), &v(&[0.0]), 1.0, &shifted).unwrap(), v(&[0.5]));
    }

    #[test]
    fn default_regularization_formula() {
        let cfg = OftrlConfig::<f64> {
            alpha: 2.0,
            ..OftrlConfig::default()
        };
        let s = Smoothness { xx: 1.0, xy: 4.0, yy: 0.5 };
        let (lx, ly) = cfg.regularization_for(&s).unwrap();
        assert!((lx - 3.0 * (1.0 + 8.0 + 0.1)).abs() < 1e-12);
        assert!((ly - 3.0 * (0.5 + 2.0 + 0.1)).abs() < 1e-12);
        // Pure linear objective still gets a positive regularizer.
        let zero = Smoothness { xx: 0.0, xy: 0.0, yy: 0.0 };
        let (lx, ly) = OftrlConfig::<f64>::default().regularization_for(&zero).unwrap();
        assert!((lx - 0.3).abs() < 1e-15 && (ly - 0.3).abs() < 1e-15);
    }

    #[test]
    fn single_iteration_with_zero_gradients_stays_at_projected_origin() {
        let f = make_bilinear_objective(Matrix::zeros(2, 2), v(&[0.0; 2]), v(&[0.0; 2])).unwrap();
        let mut oracle = NoisyOracle::new(f, ZeroNoise);
        let dom = BoxDomain::uniform(2, 0.25, 1.0).unwrap();
        let trace = oftrl_solve(&mut oracle, &dom, &dom, &OftrlConfig::with_iterations(1), None).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.solution.x, v(&[0.25, 0.25]));
        assert_eq!(trace.solution.y, v(&[0.25, 0.25]));
    }

    #[test]
    fn averages_are_exact_means_of_iterates() {
        let f = make_bilinear_objective(Matrix::identity(2), v(&[0.3, -0.2]), v(&[-0.1, 0.4])).unwrap();
        let mut oracle = NoisyOracle::new(f, ZeroNoise);
        let dom = BoxDomain::uniform(2, -1.0, 1.0).unwrap();
        let trace = oftrl_solve(&mut oracle, &dom, &dom, &OftrlConfig::with_iterations(37), None).unwrap();
        let mut sx = Vector::zeros(2);
        for r in &trace.records {
            sx.add_assign(&r.point.x).unwrap();
        }
        assert_eq!(sx.scale(1.0 / 37.0), trace.solution.x);
    }

    #[test]
    fn zero_iterations_rejected() {
        let f = make_bilinear_objective(Matrix::identity(1), v(&[0.0]), v(&[0.0])).unwrap();
        let mut oracle = NoisyOracle::new(f, ZeroNoise);
        let dom = BoxDomain::uniform(1, -1.0, 1.0).unwrap();
        assert!(oftrl_solve(&mut oracle, &dom, &dom, &OftrlConfig::with_iterations(0), None).is_err());
    }
}
