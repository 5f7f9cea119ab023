use crate::error::{check_dim, Result};
use crate::scalar::Scalar;

use super::{Objective, Smoothness, Vector};

/// One answer of a first-order oracle: estimates of `∇ₓf` and `∇_yf`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate<T> {
    pub grad_x: Vector<T>,
    pub grad_y: Vector<T>,
    /// `‖estimate − truth‖` for the x-block, when the oracle knows it.
    pub error_x: Option<T>,
    pub error_y: Option<T>,
}

/// Source of (possibly corrupted) gradient estimates queried by the saddle solvers.
pub trait GradientOracle<T: Scalar> {
    fn dims(&self) -> (usize, usize);

    fn smoothness(&self) -> Smoothness<T>;

    /// Gradient estimates at `(x, y)` for iteration `t` (1-based).
    fn query(&mut self, t: usize, x: &Vector<T>, y: &Vector<T>) -> Result<GradientEstimate<T>>;
}

/// Produces the additive perturbations `(ζ^X_t, ζ^Y_t)` injected into exact gradients.
pub trait NoisePolicy<T: Scalar> {
    fn sample(&mut self, t: usize, x: &Vector<T>, y: &Vector<T>) -> (Vector<T>, Vector<T>);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl<T: Scalar> NoisePolicy<T> for ZeroNoise {
    fn sample(&mut self, _t: usize, x: &Vector<T>, y: &Vector<T>) -> (Vector<T>, Vector<T>) {
        (Vector::zeros(x.len()), Vector::zeros(y.len()))
    }
}

/// The same bias vectors at every query.
#[derive(Debug, Clone)]
pub struct ConstantBias<T> {
    pub x: Vector<T>,
    pub y: Vector<T>,
}

impl<T: Scalar> NoisePolicy<T> for ConstantBias<T> {
    fn sample(&mut self, _t: usize, _x: &Vector<T>, _y: &Vector<T>) -> (Vector<T>, Vector<T>) {
        (self.x.clone(), self.y.clone())
    }
}

impl<T, F> NoisePolicy<T> for F
where
    T: Scalar,
    F: FnMut(usize, &Vector<T>, &Vector<T>) -> (Vector<T>, Vector<T>),
{
    fn sample(&mut self, t: usize, x: &Vector<T>, y: &Vector<T>) -> (Vector<T>, Vector<T>) {
        self(t, x, y)
    }
}

/// Full record of one noisy query, including the hidden truth.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyQuery<T> {
    pub true_grad_x: Vector<T>,
    pub true_grad_y: Vector<T>,
    pub noise_x: Vector<T>,
    pub noise_y: Vector<T>,
    pub grad_x: Vector<T>,
    pub grad_y: Vector<T>,
}

/// Exact gradients of an [`Objective`] plus injected noise.
///
/// The returned gradient is computed as `truth + noise` coordinate by coordinate, so the
/// diagnostic record reproduces it bit for bit.
#[derive(Debug, Clone)]
pub struct NoisyOracle<O, N> {
    objective: O,
    noise: N,
}

impl<O, N> NoisyOracle<O, N> {
    pub fn new(objective: O, noise: N) -> Self {
        Self { objective, noise }
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }
}

impl<O, N> NoisyOracle<O, N> {
    pub fn query_detailed<T>(&mut self, t: usize, x: &Vector<T>, y: &Vector<T>) -> Result<NoisyQuery<T>>
    where
        T: Scalar,
        O: Objective<T>,
        N: NoisePolicy<T>,
    {
        let true_grad_x = self.objective.grad_x(x, y)?;
        let true_grad_y = self.objective.grad_y(x, y)?;
        let (noise_x, noise_y) = self.noise.sample(t, x, y);
        check_dim(true_grad_x.len(), noise_x.len())?;
        check_dim(true_grad_y.len(), noise_y.len())?;
        let grad_x = (&true_grad_x + &noise_x).ensure_finite("noisy gradient")?;
        let grad_y = (&true_grad_y + &noise_y).ensure_finite("noisy gradient")?;
        Ok(NoisyQuery {
            true_grad_x,
            true_grad_y,
            noise_x,
            noise_y,
            grad_x,
            grad_y,
        })
    }
}

impl<T: Scalar, O: Objective<T>, N: NoisePolicy<T>> GradientOracle<T> for NoisyOracle<O, N> {
    fn dims(&self) -> (usize, usize) {
        self.objective.dims()
    }

    fn smoothness(&self) -> Smoothness<T> {
        self.objective.smoothness()
    }

    fn query(&mut self, t: usize, x: &Vector<T>, y: &Vector<T>) -> Result<GradientEstimate<T>> {
        let q = self.query_detailed(t, x, y)?;
        Ok(GradientEstimate {
            error_x: Some(q.noise_x.norm()),
            error_y: Some(q.noise_y.norm()),
            grad_x: q.grad_x,
            grad_y: q.grad_y,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{make_bilinear_objective, Matrix};

    #[test]
    fn noisy_gradient_is_truth_plus_noise_bitwise() {
        let f = make_bilinear_objective(
            Matrix::from_rows(&[vec![0.1, 0.7], vec![-0.3, 1.1]]).unwrap(),
            Vector::from_f64(&[0.01, 0.2]).unwrap(),
            Vector::from_f64(&[-0.4, 0.3]).unwrap(),
        )
        .unwrap();
        let mut k = 0u32;
        let noise = move |_t: usize, x: &Vector<f64>, y: &Vector<f64>| {
            k += 1;
            let s = 1.0 / (3.0 + k as f64);
            (x.scale(s), y.scale(-s * 0.7))
        };
        let mut oracle = NoisyOracle::new(f, noise);
        let x = Vector::from_f64(&[0.123456789, -0.987654321]).unwrap();
        let y = Vector::from_f64(&[1.0 / 3.0, 2.0 / 7.0]).unwrap();
        for t in 1..5 {
            let q = oracle.query_detailed(t, &x, &y).unwrap();
            let rebuilt_x = &q.true_grad_x + &q.noise_x;
            let rebuilt_y = &q.true_grad_y + &q.noise_y;
            for i in 0..2 {
                assert_eq!(rebuilt_x[i].to_bits(), q.grad_x[i].to_bits());
                assert_eq!(rebuilt_y[i].to_bits(), q.grad_y[i].to_bits());
            }
        }
    }

    #[test]
    fn constant_bias_reports_norms() {
        let f = make_bilinear_objective(
            Matrix::identity(2),
            Vector::zeros(2),
            Vector::zeros(2),
        )
        .unwrap();
        let mut oracle = NoisyOracle::new(
            f,
            ConstantBias {
                x: Vector::from_f64(&[3.0, 4.0]).unwrap(),
                y: Vector::from_f64(&[0.0, 1.0]).unwrap(),
            },
        );
        let z = Vector::zeros(2);
        let est = oracle.query(1, &z, &z).unwrap();
        assert_eq!(est.grad_x.as_slice(), &[3.0, 4.0]);
        assert_eq!(est.error_x, Some(5.0));
        assert_eq!(est.error_y, Some(1.0));
    }
}
