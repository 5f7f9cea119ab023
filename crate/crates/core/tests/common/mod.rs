#![allow(dead_code)]

use perfoptrl_core::domains::Vector;
use perfoptrl_core::perf_mdp::{MdpModel, Policy};
use rand::Rng;

pub fn v(x: &[f64]) -> Vector<f64> {
    Vector::from_f64(x).unwrap()
}

fn simplex<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Dense random MDP with full-support transitions and rewards in [−1, 1].
pub fn random_mdp<R: Rng>(states: usize, actions: usize, gamma: f64, rng: &mut R) -> MdpModel<f64> {
    let mut p = Vec::with_capacity(states * actions * states);
    for _ in 0..states * actions {
        p.extend(simplex(states, rng));
    }
    let r = (0..states * actions).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rho = Vector::new(simplex(states, rng)).unwrap();
    MdpModel::new(states, actions, p, r, rho, gamma).unwrap()
}

pub fn random_policy<R: Rng>(states: usize, actions: usize, rng: &mut R) -> Policy<f64> {
    let mut probs = Vec::with_capacity(states * actions);
    for _ in 0..states {
        probs.extend(simplex(actions, rng));
    }
    Policy::new(states, actions, probs).unwrap()
}

/// Central finite difference of `f` along coordinate `i`.
pub fn central_difference(f: impl Fn(&Vector<f64>) -> f64, at: &Vector<f64>, i: usize, step: f64) -> f64 {
    let mut plus = at.clone().into_vec();
    let mut minus = plus.clone();
    plus[i] += step;
    minus[i] -= step;
    (f(&Vector::new(plus).unwrap()) - f(&Vector::new(minus).unwrap())) / (2.0 * step)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
