use std::time::Instant;

use crate::domains::{Domain, GradientOracle};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

use super::trace::{IterationRecord, Pair, SolverKind, SolverTrace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateMode<T> {
    /// `η = 1/(8L)`: fastest contraction.
    MaxSpeed,
    /// `η = min{1/(8L), 2/C}`: smallest asymptotic floor.
    MinFloor,
    Explicit(T),
}

/// Settings for optimistic mirror descent-ascent with the Euclidean mirror map.
#[derive(Debug, Clone, PartialEq)]
pub struct OmdaConfig<T> {
    pub iterations: usize,
    /// Lipschitz constant of the operator `F(z) = (∇ₓf, −∇_yf)`.
    pub lipschitz: T,
    /// Metric-subregularity constant `C` (user supplied).
    pub spms_c: T,
    pub rate_mode: RateMode<T>,
    /// Starting point `z₀ = ẑ₁`; projected origin when absent.
    pub initial: Option<Pair<T>>,
}

impl<T: Scalar> OmdaConfig<T> {
    pub fn new(iterations: usize, lipschitz: T, spms_c: T) -> Self {
        Self {
            iterations,
            lipschitz,
            spms_c,
            rate_mode: RateMode::MaxSpeed,
            initial: None,
        }
    }

    pub fn eta(&self) -> Result<T> {
        select_omda_rate(self.rate_mode, self.lipschitz, self.spms_c)
    }
}

/// Resolves the OMDA step size; the result always satisfies `0 < η ≤ 1/(8L)`.
pub fn select_omda_rate<T: Scalar>(mode: RateMode<T>, lipschitz: T, spms_c: T) -> Result<T> {
    if !(lipschitz > T::zero() && lipschitz.is_finite()) {
        return Err(Error::Config(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    let cap = T::one() / (T::of(8.0) * lipschitz);
    match mode {
        RateMode::MaxSpeed => Ok(cap),
        RateMode::MinFloor => {
            if !(spms_c > T::zero() && spms_c.is_finite()) {
                return Err(Error::Config(format!("SP-MS constant must be positive, got {spms_c}")));
            }
            Ok(cap.min(T::of(2.0) / spms_c))
        }
        RateMode::Explicit(eta) => {
            if eta > T::zero() && eta <= cap {
                Ok(eta)
            } else {
                Err(Error::Config(format!("step size {eta} outside (0, 1/(8L)] = (0, {cap}]")))
            }
        }
    }
}

/// Per-step contraction constant `C′ = min{η²C²/8, ½}`.
pub fn omda_contraction<T: Scalar>(eta: T, spms_c: T) -> T {
    (eta * eta * spms_c * spms_c / T::of(8.0)).min(T::of(0.5))
}

/// Asymptotic squared-distance floor `max{8/(η²C²), 2}·(Zη + Z²η²)` with
/// `Z = 3(ζ_X + ζ_Y)·max{D_X + D_Y, 1}`.
pub fn omda_floor<T: Scalar>(eta: T, spms_c: T, zeta_x: T, zeta_y: T, radius_x: T, radius_y: T) -> T {
    let z = T::of(3.0) * (zeta_x + zeta_y) * (radius_x + radius_y).max(T::one());
    let lead = (T::of(8.0) / (eta * eta * spms_c * spms_c)).max(T::of(2.0));
    lead * (z * eta + z * z * eta * eta)
}

fn project_pair<T: Scalar>(p: &Pair<T>, dom_x: &dyn Domain<T>, dom_y: &dyn Domain<T>) -> Result<Pair<T>> {
    Ok(Pair::new(dom_x.project(&p.x)?, dom_y.project(&p.y)?))
}

fn descend<T: Scalar>(
    base: &Pair<T>,
    operator: &Pair<T>,
    eta: T,
    dom_x: &dyn Domain<T>,
    dom_y: &dyn Domain<T>,
) -> Result<Pair<T>> {
    let x = base.x.zip_map(&operator.x, |z, f| z - eta * f)?;
    let y = base.y.zip_map(&operator.y, |z, f| z - eta * f)?;
    project_pair(&Pair::new(x, y), dom_x, dom_y)
}

/// Result of one OMDA step.
#[derive(Debug, Clone, PartialEq)]
pub struct OmdaStep<T> {
    /// Extrapolated point `z_t` where the operator was queried.
    pub z: Pair<T>,
    /// `F̃(z_t)`.
    pub operator: Pair<T>,
    /// Updated base iterate `ẑ_{t+1}`.
    pub z_hat_next: Pair<T>,
}

/// One OMDA step with `ψ = ½‖·‖²`:
/// `z_t = Π(ẑ_t − η·F̃(z_{t−1}))`, query `F̃(z_t)`, `ẑ_{t+1} = Π(ẑ_t − η·F̃(z_t))`.
pub fn omda_step_pair<T: Scalar>(
    z_hat: &Pair<T>,
    operator_prev: &Pair<T>,
    eta: T,
    dom_x: &dyn Domain<T>,
    dom_y: &dyn Domain<T>,
    mut operator_at: impl FnMut(&Pair<T>) -> Result<Pair<T>>,
) -> Result<OmdaStep<T>> {
    let z = descend(z_hat, operator_prev, eta, dom_x, dom_y)?;
    let operator = operator_at(&z)?;
    check_dim(z.x.len(), operator.x.len())?;
    check_dim(z.y.len(), operator.y.len())?;
    let z_hat_next = descend(z_hat, &operator, eta, dom_x, dom_y)?;
    Ok(OmdaStep { z, operator, z_hat_next })
}

/// Runs `T` OMDA steps on `F̃(z) = (ĝ_x, −ĝ_y)` from the oracle.
///
/// `trace.solution` is the last base iterate. With a `reference` saddle point each record
/// carries `dist²(ẑ_{t+1}, reference)`; `trace.initial` is `ẑ₁`.
pub fn omda_solve<T, O>(
    oracle: &mut O,
    dom_x: &dyn Domain<T>,
    dom_y: &dyn Domain<T>,
    cfg: &OmdaConfig<T>,
    reference: Option<&Pair<T>>,
) -> Result<SolverTrace<T>>
where
    T: Scalar,
    O: GradientOracle<T> + ?Sized,
{
    if cfg.iterations == 0 {
        return Err(Error::Config("OMDA needs at least one iteration".into()));
    }
    let eta = cfg.eta()?;
    let dims = oracle.dims();
    let start = Instant::now();
    let initial = match &cfg.initial {
        Some(p) => {
            check_dim(dims.0, p.x.len())?;
            check_dim(dims.1, p.y.len())?;
            project_pair(p, dom_x, dom_y)?
        }
        None => project_pair(&Pair::zeros(dims), dom_x, dom_y)?,
    };

    let mut last_noise = (None, None);
    let mut query = |t: usize, z: &Pair<T>, noise: &mut (Option<T>, Option<T>)| -> Result<Pair<T>> {
        let est = oracle.query(t, &z.x, &z.y).map_err(|e| Error::Oracle {
            iteration: t,
            source: Box::new(e),
        })?;
        if !(est.grad_x.is_finite() && est.grad_y.is_finite()) {
            return Err(Error::Oracle {
                iteration: t,
                source: Box::new(Error::NonFinite("gradient estimate")),
            });
        }
        *noise = (est.error_x, est.error_y);
        Ok(Pair::new(est.grad_x, -&est.grad_y))
    };

    // F̃(z₀) seeds the first extrapolation.
    let mut operator_prev = query(0, &initial, &mut last_noise)?;
    let mut z_hat = initial.clone();
    let mut records = Vec::with_capacity(cfg.iterations);
    for t in 1..=cfg.iterations {
        let step = omda_step_pair(&z_hat, &operator_prev, eta, dom_x, dom_y, |z| {
            query(t, z, &mut last_noise)
        })?;
        let dist_sq = reference.map(|r| step.z_hat_next.distance_sq(r)).transpose()?;
        records.push(IterationRecord {
            t,
            point: step.z_hat_next.clone(),
            gap: None,
            noise_x: last_noise.0,
            noise_y: last_noise.1,
            dist_sq,
            elapsed: start.elapsed(),
        });
        operator_prev = step.operator;
        z_hat = step.z_hat_next;
    }
    Ok(SolverTrace {
        kind: SolverKind::Omda,
        records,
        initial,
        solution: z_hat,
        regularization: None,
        eta: Some(eta),
    })
}

/// Largest `C` on `grid` for which `dist²_t ≤ dist²_0·(1/(1+C′))^t + slack` holds along the
/// whole series, where `dist²_0` is the starting squared distance and `dist²_t` the value
/// after `t` steps.
pub fn calibrate_spms_constant<T: Scalar>(
    initial_dist_sq: T,
    dist_sq: &[T],
    eta: T,
    grid: &[T],
    slack: T,
) -> Option<T> {
    grid.iter()
        .copied()
        .filter(|&c| {
            let q = T::one() / (T::one() + omda_contraction(eta, c));
            let mut envelope = initial_dist_sq;
            dist_sq.iter().all(|&d| {
                envelope = envelope * q;
                d <= envelope + slack
            })
        })
        .fold(None, |best: Option<T>, c| Some(best.map_or(c, |b| b.max(c))))
}
