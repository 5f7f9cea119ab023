use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

use super::{Domain, Matrix, Vector};

/// Lipschitz constants of the partial gradients:
/// `∇ₓf(·,y)` is `xx`-Lipschitz, `∇ₓf(x,·)` and `∇_yf(·,y)` are `xy`-Lipschitz,
/// `∇_yf(x,·)` is `yy`-Lipschitz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothness<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

/// A smooth convex-concave function `f(x, y)`, minimized in `x` and maximized in `y`.
pub trait Objective<T: Scalar>: Send + Sync {
    /// `(dim x, dim y)`.
    fn dims(&self) -> (usize, usize);

    fn value(&self, x: &Vector<T>, y: &Vector<T>) -> Result<T>;

    fn grad_x(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Vector<T>>;

    fn grad_y(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Vector<T>>;

    fn smoothness(&self) -> Smoothness<T>;

    /// `argmin_{x ∈ dom} f(x, y)` when available in closed form.
    fn best_response_x(&self, _y: &Vector<T>, _dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        None
    }

    /// `argmax_{y ∈ dom} f(x, y)` when available in closed form.
    fn best_response_y(&self, _x: &Vector<T>, _dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        None
    }
}

fn check_point<T: Scalar>(dims: (usize, usize), x: &Vector<T>, y: &Vector<T>) -> Result<()> {
    check_dim(dims.0, x.len())?;
    check_dim(dims.1, y.len())
}

/// `f(x, y) = xᵀAy + xᵀu + yᵀv`.
#[derive(Debug, Clone)]
pub struct BilinearObjective<T> {
    a: Matrix<T>,
    u: Vector<T>,
    v: Vector<T>,
    l_xy: T,
}

/// Builds the bilinear objective `xᵀAy + xᵀu + yᵀv`; `L_XY` is the spectral norm of `A`.
pub fn make_bilinear_objective<T: Scalar>(
    a: Matrix<T>,
    u: Vector<T>,
    v: Vector<T>,
) -> Result<BilinearObjective<T>> {
    check_dim(a.rows(), u.len())?;
    check_dim(a.cols(), v.len())?;
    let l_xy = a.spectral_norm();
    Ok(BilinearObjective { a, u, v, l_xy })
}

impl<T: Scalar> BilinearObjective<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn linear_x(&self) -> &Vector<T> {
        &self.u
    }

    pub fn linear_y(&self) -> &Vector<T> {
        &self.v
    }
}

impl<T: Scalar> Objective<T> for BilinearObjective<T> {
    fn dims(&self) -> (usize, usize) {
        (self.a.rows(), self.a.cols())
    }

    fn value(&self, x: &Vector<T>, y: &Vector<T>) -> Result<T> {
        check_point(self.dims(), x, y)?;
        Ok(x.dot(&self.a.mul_vec(y)?)? + x.dot(&self.u)? + y.dot(&self.v)?)
    }

    fn grad_x(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Vector<T>> {
        check_point(self.dims(), x, y)?;
        Ok(&self.a.mul_vec(y)? + &self.u)
    }

    fn grad_y(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Vector<T>> {
        check_point(self.dims(), x, y)?;
        Ok(&self.a.mul_transpose_vec(x)? + &self.v)
    }

    fn smoothness(&self) -> Smoothness<T> {
        Smoothness {
            xx: T::zero(),
            xy: self.l_xy,
            yy: T::zero(),
        }
    }

    fn best_response_x(&self, y: &Vector<T>, dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        Some(self.grad_x(&Vector::zeros(self.dims().0), y).and_then(|g| dom.linear_minimizer(&g)))
    }

    fn best_response_y(&self, x: &Vector<T>, dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        Some(
            self.grad_y(x, &Vector::zeros(self.dims().1))
                .and_then(|g| dom.linear_minimizer(&-&g)),
        )
    }
}

/// `f(x, y) = ½‖x‖² − ½‖y‖² + sign·(xᵀζ_X + yᵀζ_Y)`, strongly convex-strongly concave.
#[derive(Debug, Clone)]
pub struct SccObjective<T> {
    zeta_x: Vector<T>,
    zeta_y: Vector<T>,
    sign: T,
}

pub fn make_scc_objective<T: Scalar>(
    zeta_x: Vector<T>,
    zeta_y: Vector<T>,
    sign: i8,
) -> Result<SccObjective<T>> {
    let sign = match sign {
        1 => T::one(),
        -1 => -T::one(),
        other => return Err(Error::Config(format!("sign must be +1 or -1, got {other}"))),
    };
    Ok(SccObjective { zeta_x, zeta_y, sign })
}

impl<T: Scalar> SccObjective<T> {
    /// The unconstrained saddle point `(−sign·ζ_X, sign·ζ_Y)`.
    pub fn saddle_point(&self) -> (Vector<T>, Vector<T>) {
        (self.zeta_x.scale(-self.sign), self.zeta_y.scale(self.sign))
    }
}

impl<T: Scalar> Objective<T> for SccObjective<T> {
    fn dims(&self) -> (usize, usize) {
        (self.zeta_x.len(), self.zeta_y.len())
    }

    fn value(&self, x: &Vector<T>, y: &Vector<T>) -> Result<T> {
        check_point(self.dims(), x, y)?;
        let half = T::of(0.5);
        Ok(half * x.norm_sq() - half * y.norm_sq()
            + self.sign * (x.dot(&self.zeta_x)? + y.dot(&self.zeta_y)?))
    }

    fn grad_x(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Vector<T>> {
        check_point(self.dims(), x, y)?;
        x.zip_map(&self.zeta_x, |a, z| a + self.sign * z)
    }

    fn grad_y(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Vector<T>> {
        check_point(self.dims(), x, y)?;
        y.zip_map(&self.zeta_y, |b, z| -b + self.sign * z)
    }

    fn smoothness(&self) -> Smoothness<T> {
        Smoothness {
            xx: T::one(),
            xy: T::zero(),
            yy: T::one(),
        }
    }

    // The quadratic has identity Hessian, so the constrained optimum is the projection
    // of the unconstrained one.
    fn best_response_x(&self, y: &Vector<T>, dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        if let Err(e) = check_dim(self.dims().1, y.len()) {
            return Some(Err(e));
        }
        Some(dom.project(&self.zeta_x.scale(-self.sign)))
    }

    fn best_response_y(&self, x: &Vector<T>, dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        if let Err(e) = check_dim(self.dims().0, x.len()) {
            return Some(Err(e));
        }
        Some(dom.project(&self.zeta_y.scale(self.sign)))
    }
}
