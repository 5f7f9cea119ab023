use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::domains::{GradientEstimate, GradientOracle, Smoothness, Vector};
use crate::error::{check_dim, Error, Result};
use crate::robust_stats::{naive_mean_columns, robust_mean_columns, Columns, SparseVector};
use crate::scalar::Scalar;

use super::lagrangian::{grad_d, grad_h, LagrangianParams};
use super::model::{MdpModel, OccupancyMeasure, TransitionSample};

/// Draws `m` i.i.d. transitions with `(s, a) ~ (1−γ)·d_n`, `r = r(s, a)`, `s′ ~ P(·|s, a)`.
pub fn sample_dataset<T: Scalar, R: Rng + ?Sized>(
    d_n: &OccupancyMeasure<T>,
    mdp: &MdpModel<T>,
    m: usize,
    rng: &mut R,
) -> Result<Vec<TransitionSample<T>>> {
    check_dim(mdp.states(), d_n.states())?;
    check_dim(mdp.actions(), d_n.actions())?;
    if m == 0 {
        return Err(Error::Config("dataset size must be positive".into()));
    }
    let na = mdp.actions();
    for (i, &v) in d_n.as_vector().iter().enumerate() {
        if !(v > T::zero()) {
            return Err(Error::Coverage { state: i / na, action: i % na });
        }
    }
    let weights: Vec<f64> = d_n.as_vector().iter().map(|v| v.as_f64()).collect();
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::Domain(e.to_string()))?;
    // Support and running sums of each P(·|s, a); draws match `sample_index` exactly.
    let successors: Vec<Vec<(usize, f64)>> = (0..mdp.states() * na)
        .map(|sa| {
            let mut acc = 0.0;
            mdp.transition_row(sa / na, sa % na)
                .iter()
                .enumerate()
                .filter(|(_, p)| p.as_f64() > 0.0)
                .map(|(i, p)| {
                    acc += p.as_f64();
                    (i, acc)
                })
                .collect()
        })
        .collect();
    Ok((0..m)
        .map(|_| {
            let sa = pick.sample(rng);
            let (s, a) = (sa / na, sa % na);
            let u: f64 = rng.random();
            let row = &successors[sa];
            let s_next = row.iter().find(|&&(_, acc)| u < acc).or(row.last()).map_or(0, |&(i, _)| i);
            TransitionSample { s, a, s_next, r: mdp.reward(s, a) }
        })
        .collect())
}

fn scaled_inverse<T: Scalar>(sample: &TransitionSample<T>, d_n: &OccupancyMeasure<T>, gamma: T) -> Result<T> {
    let mass = d_n.get(sample.s, sample.a);
    if !(mass > T::zero()) {
        return Err(Error::Coverage { state: sample.s, action: sample.a });
    }
    Ok(T::one() / ((T::one() - gamma) * mass))
}

fn check_sample<T>(sample: &TransitionSample<T>, states: usize, actions: usize) -> Result<()> {
    if sample.s >= states || sample.s_next >= states {
        return Err(Error::Dimension { expected: states, found: sample.s.max(sample.s_next) + 1 });
    }
    if sample.a >= actions {
        return Err(Error::Dimension { expected: actions, found: sample.a + 1 });
    }
    Ok(())
}

/// Single-entry sample of `∇_d𝓛 + λd` at `(s_i, a_i)`:
/// `(γh(s′) − h(s) + r)/((1−γ)·d_n(s, a))`.
pub fn gd_sample<T: Scalar>(
    sample: &TransitionSample<T>,
    h: &Vector<T>,
    d_n: &OccupancyMeasure<T>,
    gamma: T,
) -> Result<SparseVector<T>> {
    let (ns, na) = (d_n.states(), d_n.actions());
    check_dim(ns, h.len())?;
    check_sample(sample, ns, na)?;
    let scale = scaled_inverse(sample, d_n, gamma)?;
    let value = (gamma * h[sample.s_next] - h[sample.s] + sample.r) * scale;
    if !value.is_finite() {
        return Err(Error::NonFinite("gradient sample"));
    }
    SparseVector::single(ns * na, sample.s * na + sample.a, value)
}

/// Sample of `∇_h𝓛 − ρ`: `d(s,a)·(γ·1{· = s′} − 1{· = s})/((1−γ)·d_n(s, a))`.
pub fn gh_sample<T: Scalar>(
    sample: &TransitionSample<T>,
    d: &Vector<T>,
    d_n: &OccupancyMeasure<T>,
    gamma: T,
) -> Result<SparseVector<T>> {
    let (ns, na) = (d_n.states(), d_n.actions());
    check_dim(ns * na, d.len())?;
    check_sample(sample, ns, na)?;
    let w = d[sample.s * na + sample.a] * scaled_inverse(sample, d_n, gamma)?;
    if sample.s == sample.s_next {
        SparseVector::single(ns, sample.s, w * (gamma - T::one()))
    } else {
        SparseVector::new(ns, vec![(sample.s, -w), (sample.s_next, w * gamma)])
    }
}

/// Mean estimator used for the `d`-gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GradientEstimator {
    /// Coordinate-wise trimmed mean around the median.
    Robust,
    Naive,
}

/// Inputs shared by every gradient evaluation within one round.
#[derive(Debug, Clone, Copy)]
pub struct GradientContext<'a, T> {
    pub mdp: &'a MdpModel<T>,
    pub d_n: &'a OccupancyMeasure<T>,
    pub params: &'a LagrangianParams<T>,
    pub epsilon: f64,
    pub estimator: GradientEstimator,
}

/// `(ĝ_d, ĝ_h)` from two disjoint batches: `ĝ_d = mean_ε(gd samples) − λd` and
/// `ĝ_h = naive_mean(gh samples) + ρ`.
///
/// Equivalent to building the samples with [`gd_sample`]/[`gh_sample`] and calling the
/// `robust_stats` estimators, without materializing one vector per sample.
pub fn robust_lagrangian_gradients<T: Scalar>(
    batch_d: &[TransitionSample<T>],
    batch_h: &[TransitionSample<T>],
    d: &Vector<T>,
    h: &Vector<T>,
    ctx: &GradientContext<'_, T>,
) -> Result<(Vector<T>, Vector<T>)> {
    let gamma = ctx.mdp.gamma();
    let (ns, na) = (ctx.mdp.states(), ctx.mdp.actions());
    check_dim(ns, h.len())?;
    check_dim(ns * na, d.len())?;
    if batch_d.is_empty() || batch_h.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if !(0.0..0.5).contains(&ctx.epsilon) {
        return Err(Error::Config(format!("corruption level must lie in [0, 0.5), got {}", ctx.epsilon)));
    }

    let mut gd = Vec::with_capacity(batch_d.len());
    for (n, s) in batch_d.iter().enumerate() {
        check_sample(s, ns, na)?;
        let scale = scaled_inverse(s, ctx.d_n, gamma)?;
        let value = (gamma * h[s.s_next] - h[s.s] + s.r) * scale;
        if !value.is_finite() {
            return Err(Error::NonFinite("gradient sample"));
        }
        gd.push((n, s.s * na + s.a, value));
    }
    let gd = Columns::build(ns * na, batch_d.len(), gd.iter().copied());
    let mean_d = match ctx.estimator {
        GradientEstimator::Robust => robust_mean_columns(&gd, ctx.epsilon),
        GradientEstimator::Naive => naive_mean_columns(&gd),
    };

    let mut gh = Vec::with_capacity(2 * batch_h.len());
    for (n, s) in batch_h.iter().enumerate() {
        check_sample(s, ns, na)?;
        let w = d[s.s * na + s.a] * scaled_inverse(s, ctx.d_n, gamma)?;
        if s.s == s.s_next {
            gh.push((n, s.s, w * (gamma - T::one())));
        } else if s.s < s.s_next {
            gh.push((n, s.s, -w));
            gh.push((n, s.s_next, w * gamma));
        } else {
            gh.push((n, s.s_next, w * gamma));
            gh.push((n, s.s, -w));
        }
    }
    let mean_h = naive_mean_columns(&Columns::build(ns, batch_h.len(), gh.iter().copied()));

    let g_d = mean_d.zip_map(d, |m, x| m - ctx.params.lambda * x)?;
    let g_h = &mean_h + ctx.mdp.rho();
    Ok((g_d, g_h))
}

/// Oracle over `2T` batches: query `t` uses batch `2t−1` for `d` and `2t` for `h`
/// (1-based). Points are `x = h`, `y = d`.
pub struct LagrangianOracle<'a, T> {
    ctx: GradientContext<'a, T>,
    batches: Vec<&'a [TransitionSample<T>]>,
    /// Report estimation errors against the exact gradients of `ctx.mdp`.
    pub track_errors: bool,
}

impl<'a, T: Scalar> LagrangianOracle<'a, T> {
    pub fn new(ctx: GradientContext<'a, T>, batches: Vec<&'a [TransitionSample<T>]>) -> Self {
        Self {
            ctx,
            batches,
            track_errors: true,
        }
    }

    pub fn iterations(&self) -> usize {
        self.batches.len() / 2
    }
}

impl<T: Scalar> GradientOracle<T> for LagrangianOracle<'_, T> {
    fn dims(&self) -> (usize, usize) {
        let m = self.ctx.mdp;
        (m.states(), m.states() * m.actions())
    }

    fn smoothness(&self) -> Smoothness<T> {
        Smoothness {
            xx: T::zero(),
            xy: self.ctx.params.coupling_norm(),
            yy: self.ctx.params.lambda,
        }
    }

    fn query(&mut self, t: usize, h: &Vector<T>, d: &Vector<T>) -> Result<GradientEstimate<T>> {
        if t == 0 || 2 * t > self.batches.len() {
            return Err(Error::InsufficientData {
                needed: 2 * t.max(1),
                available: self.batches.len(),
            });
        }
        let (g_d, g_h) = robust_lagrangian_gradients(self.batches[2 * t - 2], self.batches[2 * t - 1], d, h, &self.ctx)?;
        let (error_x, error_y) = if self.track_errors {
            let true_h = grad_h(d, h, self.ctx.mdp, self.ctx.params)?;
            let true_d = grad_d(d, h, self.ctx.mdp, self.ctx.params)?;
            (Some(g_h.distance(&true_h)?), Some(g_d.distance(&true_d)?))
        } else {
            (None, None)
        };
        Ok(GradientEstimate {
            grad_x: g_h,
            grad_y: g_d,
            error_x,
            error_y,
        })
    }
}
