use std::fmt::Debug;

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

use super::Vector;

/// A closed convex set with a Euclidean projection.
pub trait Domain<T: Scalar>: Debug + Send + Sync {
    /// Euclidean projection of `v` onto the set.
    fn project(&self, v: &Vector<T>) -> Result<Vector<T>>;

    /// A minimizer of `⟨g, x⟩` over the set.
    fn linear_minimizer(&self, g: &Vector<T>) -> Result<Vector<T>>;

    /// `max ‖x‖` over the set, for vectors of length `dim`.
    fn radius(&self, dim: usize) -> T;

    fn contains(&self, v: &Vector<T>, tol: T) -> bool;
}

/// Axis-aligned box `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain<T> {
    lower: Vector<T>,
    upper: Vector<T>,
}

impl<T: Scalar> BoxDomain<T> {
    pub fn new(lower: Vector<T>, upper: Vector<T>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::Domain(format!(
                "lower[{i}] = {} exceeds upper[{i}] = {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn uniform(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(Vector::filled(dim, lo), Vector::filled(dim, hi))
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &Vector<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Vector<T> {
        &self.upper
    }
}

/// Clips every coordinate of `v` into `[lower[i], upper[i]]`.
pub fn project_box<T: Scalar>(v: &Vector<T>, dom: &BoxDomain<T>) -> Result<Vector<T>> {
    check_dim(dom.dim(), v.len())?;
    Ok(Vector::from_fn(v.len(), |i| {
        v[i].max(dom.lower[i]).min(dom.upper[i])
    }))
}

impl<T: Scalar> Domain<T> for BoxDomain<T> {
    fn project(&self, v: &Vector<T>) -> Result<Vector<T>> {
        project_box(v, self)
    }

    fn linear_minimizer(&self, g: &Vector<T>) -> Result<Vector<T>> {
        check_dim(self.dim(), g.len())?;
        Ok(Vector::from_fn(g.len(), |i| {
            if g[i] > T::zero() {
                self.lower[i]
            } else if g[i] < T::zero() {
                self.upper[i]
            } else {
                T::zero().max(self.lower[i]).min(self.upper[i])
            }
        }))
    }

    fn radius(&self, _dim: usize) -> T {
        self.lower
            .iter()
            .zip(self.upper.iter())
            .map(|(&l, &u)| {
                let m = l.abs().max(u.abs());
                m * m
            })
            .sum::<T>()
            .sqrt()
    }

    fn contains(&self, v: &Vector<T>, tol: T) -> bool {
        v.len() == self.dim()
            && (0..v.len()).all(|i| v[i] >= self.lower[i] - tol && v[i] <= self.upper[i] + tol)
    }
}

/// Centered Euclidean ball `‖x‖ ≤ radius` of any dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallDomain<T> {
    radius: T,
}

impl<T: Scalar> BallDomain<T> {
    pub fn new(radius: T) -> Result<Self> {
        if !radius.is_finite() || radius < T::zero() {
            return Err(Error::Domain(format!("ball radius {radius} must be finite and >= 0")));
        }
        Ok(Self { radius })
    }

    pub fn radius_value(&self) -> T {
        self.radius
    }
}

/// Returns `v` if it lies in the ball, otherwise its radial rescaling onto the sphere.
pub fn project_ball<T: Scalar>(v: &Vector<T>, dom: &BallDomain<T>) -> Vector<T> {
    let n = v.norm();
    if n <= dom.radius {
        v.clone()
    } else {
        v.scale(dom.radius / n)
    }
}

impl<T: Scalar> Domain<T> for BallDomain<T> {
    fn project(&self, v: &Vector<T>) -> Result<Vector<T>> {
        Ok(project_ball(v, self))
    }

    fn linear_minimizer(&self, g: &Vector<T>) -> Result<Vector<T>> {
        let n = g.norm();
        if n == T::zero() {
            Ok(Vector::zeros(g.len()))
        } else {
            Ok(g.scale(-self.radius / n))
        }
    }

    fn radius(&self, _dim: usize) -> T {
        self.radius
    }

    fn contains(&self, v: &Vector<T>, tol: T) -> bool {
        v.norm() <= self.radius + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::from_f64(x).unwrap()
    }

    #[test]
    fn box_projection_examples() {
        let unit = BoxDomain::uniform(1, 0.0, 1.0).unwrap();
        assert_eq!(project_box(&v(&[1.5]), &unit).unwrap(), v(&[1.0]));
        assert_eq!(project_box(&v(&[0.3]), &unit).unwrap(), v(&[0.3]));
        let cube = BoxDomain::uniform(3, 0.0, 1.0).unwrap();
        assert_eq!(
            project_box(&v(&[-2.0, 0.5, 7.0]), &cube).unwrap(),
            v(&[0.0, 0.5, 1.0])
        );
        assert!(matches!(
            project_box(&v(&[1.0, 2.0]), &unit),
            Err(Error::Dimension { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn box_rejects_inverted_bounds() {
        assert!(BoxDomain::new(v(&[1.0]), v(&[0.0])).is_err());
        assert!(BoxDomain::new(v(&[0.0]), v(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn ball_projection_examples() {
        let ten = BallDomain::new(10.0).unwrap();
        let five = BallDomain::new(5.0).unwrap();
        assert_eq!(project_ball(&v(&[3.0, 4.0]), &ten), v(&[3.0, 4.0]));
        assert_eq!(project_ball(&v(&[3.0, 4.0]), &five), v(&[3.0, 4.0]));
        assert_eq!(project_ball(&v(&[6.0, 8.0]), &five), v(&[3.0, 4.0]));
        assert!(BallDomain::new(-1.0).is_err());
    }

    #[test]
    fn linear_minimizers() {
        let cube = BoxDomain::uniform(3, -1.0, 2.0).unwrap();
        assert_eq!(
            cube.linear_minimizer(&v(&[1.0, -3.0, 0.0])).unwrap(),
            v(&[-1.0, 2.0, 0.0])
        );
        let ball = BallDomain::new(2.0).unwrap();
        let m = ball.linear_minimizer(&v(&[3.0, 4.0])).unwrap();
        assert!(m.distance(&v(&[-1.2, -1.6])).unwrap() < 1e-15);
    }

    #[test]
    fn radii() {
        let cube = BoxDomain::uniform(2, -1.0, 1.0).unwrap();
        assert!((cube.radius(2) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(BallDomain::new(4.0).unwrap().radius(7), 4.0);
    }
}
