use std::time::Duration;

use crate::domains::Vector;
use crate::error::Result;
use crate::scalar::Scalar;

/// A point `(x, y)`, or the two blocks of an operator value such as `(∇ₓf, −∇_yf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair<T> {
    pub x: Vector<T>,
    pub y: Vector<T>,
}

impl<T: Scalar> Pair<T> {
    pub fn new(x: Vector<T>, y: Vector<T>) -> Self {
        Self { x, y }
    }

    pub fn zeros(dims: (usize, usize)) -> Self {
        Self::new(Vector::zeros(dims.0), Vector::zeros(dims.1))
    }

    pub fn distance_sq(&self, other: &Self) -> Result<T> {
        let dx = self.x.zip_map(&other.x, |a, b| a - b)?;
        let dy = self.y.zip_map(&other.y, |a, b| a - b)?;
        Ok(dx.norm_sq() + dy.norm_sq())
    }

    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.distance_sq(other)?.sqrt())
    }

    pub fn bitwise_eq(&self, other: &Self) -> bool {
        let same = |a: &Vector<T>, b: &Vector<T>| {
            a.len() == b.len()
                && a.iter()
                    .zip(b.iter())
                    .all(|(p, q)| p.as_f64().to_bits() == q.as_f64().to_bits())
        };
        same(&self.x, &other.x) && same(&self.y, &other.y)
    }
}

/// One solver iteration.
///
/// For OFTRL `point` is the played pair `(x_t, y_t)` and `gap` is evaluated at the running
/// average. For OMDA `point` is the base iterate after the step and `dist_sq` its squared
/// distance to the reference saddle.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub t: usize,
    pub point: Pair<T>,
    pub gap: Option<T>,
    pub noise_x: Option<T>,
    pub noise_y: Option<T>,
    pub dist_sq: Option<T>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Oftrl,
    Omda,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace<T> {
    pub kind: SolverKind,
    pub records: Vec<IterationRecord<T>>,
    /// Starting point: `(x₁, y₁)` for OFTRL, `ẑ₁` for OMDA.
    pub initial: Pair<T>,
    /// Averaged pair `(x̄, ȳ)` for OFTRL, last base iterate for OMDA.
    pub solution: Pair<T>,
    /// `(λ_X, λ_Y)` used by OFTRL.
    pub regularization: Option<(T, T)>,
    /// Step size used by OMDA.
    pub eta: Option<T>,
}

impl<T: Scalar> SolverTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `(t, gap)` for every iteration where the gap was evaluated.
    pub fn gaps(&self) -> Vec<(usize, T)> {
        self.records
            .iter()
            .filter_map(|r| r.gap.map(|g| (r.t, g)))
            .collect()
    }

    pub fn final_gap(&self) -> Option<T> {
        self.records.last().and_then(|r| r.gap)
    }

    /// `Σ_t ‖ζ^X_t‖` and `Σ_t ‖ζ^Y_t‖` over the first `upto` iterations, if every record knows
    /// its noise.
    pub fn noise_sums(&self, upto: usize) -> Option<(T, T)> {
        let mut sx = T::zero();
        let mut sy = T::zero();
        for r in self.records.iter().take(upto) {
            sx = sx + r.noise_x?;
            sy = sy + r.noise_y?;
        }
        Some((sx, sy))
    }

    /// Bit-for-bit comparison of all numeric content (timings excluded).
    pub fn numerically_identical(&self, other: &Self) -> bool {
        let opt = |a: Option<T>, b: Option<T>| match (a, b) {
            (Some(a), Some(b)) => a.as_f64().to_bits() == b.as_f64().to_bits(),
            (None, None) => true,
            _ => false,
        };
        self.kind == other.kind
            && self.records.len() == other.records.len()
            && self.solution.bitwise_eq(&other.solution)
            && self.records.iter().zip(&other.records).all(|(a, b)| {
                a.t == b.t
                    && a.point.bitwise_eq(&b.point)
                    && opt(a.gap, b.gap)
                    && opt(a.noise_x, b.noise_x)
                    && opt(a.noise_y, b.noise_y)
                    && opt(a.dist_sq, b.dist_sq)
            })
    }
}
