use rand::Rng;

use crate::domains::{Matrix, Vector};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

use super::model::{MdpModel, OccupancyMeasure, Policy};

fn check_shapes<T: Scalar>(pi: &Policy<T>, mdp: &MdpModel<T>) -> Result<()> {
    check_dim(mdp.states(), pi.states())?;
    check_dim(mdp.actions(), pi.actions())
}

/// Draws an index from a probability vector.
pub(crate) fn sample_index<T: Scalar, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Discounted occupancy of `pi` in `mdp` from the flow equations `(I − γP_πᵀ)μ = ρ`,
/// `d(s, a) = μ(s)·π(a|s)`.
pub fn exact_occupancy<T: Scalar>(pi: &Policy<T>, mdp: &MdpModel<T>) -> Result<OccupancyMeasure<T>> {
    check_shapes(pi, mdp)?;
    let (ns, na) = (mdp.states(), mdp.actions());
    let gamma = mdp.gamma();
    let mut system = Matrix::identity(ns);
    for s in 0..ns {
        for a in 0..na {
            let w = gamma * pi.prob(s, a);
            if w == T::zero() {
                continue;
            }
            for (next, &p) in mdp.transition_row(s, a).iter().enumerate() {
                if p != T::zero() {
                    system.set(next, s, system.get(next, s) - w * p);
                }
            }
        }
    }
    let mu = system.solve(mdp.rho())?;
    let d = Vector::from_fn(ns * na, |i| (mu[i / na] * pi.prob(i / na, i % na)).max(T::zero()));
    let occ = OccupancyMeasure::new(ns, na, d)?;
    let residual = occ.flow_residual(mdp)?;
    let scale = T::one() / (T::one() - gamma);
    if !(residual <= T::epsilon().sqrt() * scale) {
        return Err(Error::Singular(format!("flow residual {residual} after linear solve")));
    }
    Ok(occ)
}

/// Monte-Carlo estimate from `trajectories` rollouts truncated after `horizon` steps.
pub fn mc_occupancy<T: Scalar, R: Rng + ?Sized>(
    pi: &Policy<T>,
    mdp: &MdpModel<T>,
    trajectories: usize,
    horizon: usize,
    rng: &mut R,
) -> Result<OccupancyMeasure<T>> {
    check_shapes(pi, mdp)?;
    if trajectories == 0 || horizon == 0 {
        return Err(Error::Config("need at least one trajectory and one step".into()));
    }
    let na = mdp.actions();
    let mut acc = vec![0.0f64; mdp.states() * na];
    let gamma = mdp.gamma().as_f64();
    for _ in 0..trajectories {
        let mut s = sample_index(mdp.rho().as_slice(), rng);
        let mut weight = 1.0;
        for _ in 0..horizon {
            let a = sample_index(pi.row(s), rng);
            acc[s * na + a] += weight;
            weight *= gamma;
            s = sample_index(mdp.transition_row(s, a), rng);
        }
    }
    let n = trajectories as f64;
    OccupancyMeasure::new(
        mdp.states(),
        na,
        Vector::from_fn(acc.len(), |i| T::of(acc[i] / n)),
    )
}

/// `π(a|s) = d(s,a)/Σ_a′ d(s,a′)`, uniform on rows with no mass.
pub fn policy_from_occupancy<T: Scalar>(d: &OccupancyMeasure<T>) -> Result<Policy<T>> {
    if d.as_vector().iter().any(|&v| !(v >= T::zero())) {
        return Err(Error::Domain("occupancy entries must be non-negative".into()));
    }
    let (ns, na) = (d.states(), d.actions());
    let mut probs = Vec::with_capacity(ns * na);
    for s in 0..ns {
        let total: T = (0..na).map(|a| d.get(s, a)).sum();
        if total > T::zero() {
            probs.extend((0..na).map(|a| d.get(s, a) / total));
        } else {
            probs.extend(std::iter::repeat_n(T::one() / T::of_usize(na), na));
        }
    }
    Ok(Policy::from_rows_unchecked(ns, na, probs))
}

/// `Σ_{s,a} d(s,a)·r(s,a)`.
pub fn return_of<T: Scalar>(d: &OccupancyMeasure<T>, rewards: &[T]) -> Result<T> {
    check_dim(d.as_vector().len(), rewards.len())?;
    Ok(d.as_vector().iter().zip(rewards).map(|(&x, &r)| x * r).sum())
}

/// `min_{s,a}` of the occupancy of `pi`: the coverage constant `B`. Zero means coverage fails.
pub fn coverage_floor<T: Scalar>(pi: &Policy<T>, mdp: &MdpModel<T>) -> Result<T> {
    Ok(exact_occupancy(pi, mdp)?.min_entry())
}
