use crate::domains::{BoxDomain, Domain, Matrix, Objective, Smoothness, Vector};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

use super::model::MdpModel;

/// Regularization and multiplier bound of the Lagrangian, with the cached coupling matrix
/// `K[(s,a)][s″] = γ·P(s″|s,a) − 1{s″ = s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianParams<T> {
    pub lambda: T,
    pub h_max: T,
    coupling: Matrix<T>,
    coupling_norm: T,
    /// Nonzeros of `K` as `(row, col, value)`, row-major.
    coupling_entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> LagrangianParams<T> {
    pub fn new(mdp: &MdpModel<T>, lambda: T, h_max: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::Config(format!("regularization must be positive, got {lambda}")));
        }
        if !(h_max > T::zero() && h_max.is_finite()) {
            return Err(Error::Config(format!("h_max must be positive, got {h_max}")));
        }
        let (ns, na) = (mdp.states(), mdp.actions());
        let mut k = Matrix::zeros(ns * na, ns);
        for s in 0..ns {
            for a in 0..na {
                let row = mdp.index(s, a);
                for (next, &p) in mdp.transition_row(s, a).iter().enumerate() {
                    k.set(row, next, mdp.gamma() * p);
                }
                k.set(row, s, k.get(row, s) - T::one());
            }
        }
        let coupling_norm = k.spectral_norm();
        let mut coupling_entries = Vec::new();
        for row in 0..k.rows() {
            for (col, &v) in k.row(row).iter().enumerate() {
                if v != T::zero() {
                    coupling_entries.push((row, col, v));
                }
            }
        }
        Ok(Self {
            lambda,
            h_max,
            coupling: k,
            coupling_norm,
            coupling_entries,
        })
    }

    /// `Kh`.
    pub fn apply_coupling(&self, h: &Vector<T>) -> Result<Vector<T>> {
        check_dim(self.coupling.cols(), h.len())?;
        let mut out = vec![T::zero(); self.coupling.rows()];
        for &(r, c, v) in &self.coupling_entries {
            out[r] = out[r] + v * h[c];
        }
        Ok(Vector::from_vec_unchecked(out))
    }

    /// `Kᵀd`.
    pub fn apply_coupling_transpose(&self, d: &Vector<T>) -> Result<Vector<T>> {
        check_dim(self.coupling.rows(), d.len())?;
        let mut out = vec![T::zero(); self.coupling.cols()];
        for &(r, c, v) in &self.coupling_entries {
            out[c] = out[c] + v * d[r];
        }
        Ok(Vector::from_vec_unchecked(out))
    }

    pub fn coupling(&self) -> &Matrix<T> {
        &self.coupling
    }

    /// `‖K‖₂`, the cross smoothness constant.
    pub fn coupling_norm(&self) -> T {
        self.coupling_norm
    }

    /// Box `[−h_max, h_max]^S` for the multipliers.
    pub fn h_domain(&self) -> BoxDomain<T> {
        BoxDomain::uniform(self.coupling.cols(), -self.h_max, self.h_max).expect("h_max > 0")
    }

    /// Box `[0, 1/(1−γ)]^{SA}` for occupancy iterates.
    pub fn d_domain(&self, gamma: T) -> BoxDomain<T> {
        BoxDomain::uniform(self.coupling.rows(), T::zero(), T::one() / (T::one() - gamma))
            .expect("γ < 1")
    }
}

fn check<T: Scalar>(d: &Vector<T>, h: &Vector<T>, mdp: &MdpModel<T>) -> Result<()> {
    check_dim(mdp.states() * mdp.actions(), d.len())?;
    check_dim(mdp.states(), h.len())
}

/// `𝓛(d, h) = −λ/2·‖d‖² + hᵀρ + dᵀr + dᵀKh`.
pub fn lagrangian_value<T: Scalar>(
    d: &Vector<T>,
    h: &Vector<T>,
    mdp: &MdpModel<T>,
    params: &LagrangianParams<T>,
) -> Result<T> {
    check(d, h, mdp)?;
    let kh = params.apply_coupling(h)?;
    let r = mdp.reward_vector();
    Ok(-params.lambda / T::of(2.0) * d.norm_sq() + h.dot(mdp.rho())? + d.dot(&r)? + d.dot(&kh)?)
}

/// `∇_d 𝓛 = −λd + r + Kh`.
pub fn grad_d<T: Scalar>(
    d: &Vector<T>,
    h: &Vector<T>,
    mdp: &MdpModel<T>,
    params: &LagrangianParams<T>,
) -> Result<Vector<T>> {
    check(d, h, mdp)?;
    let kh = params.apply_coupling(h)?;
    Ok(Vector::from_fn(d.len(), |i| -params.lambda * d[i] + mdp.rewards()[i] + kh[i]))
}

/// `∇_h 𝓛 = ρ + Kᵀd`.
pub fn grad_h<T: Scalar>(
    d: &Vector<T>,
    h: &Vector<T>,
    mdp: &MdpModel<T>,
    params: &LagrangianParams<T>,
) -> Result<Vector<T>> {
    check(d, h, mdp)?;
    let ktd = params.apply_coupling_transpose(d)?;
    Ok(mdp.rho() + &ktd)
}

/// The Lagrangian as a saddle objective: `x = h` (minimized), `y = d` (maximized).
#[derive(Debug, Clone)]
pub struct LagrangianObjective<T> {
    mdp: MdpModel<T>,
    params: LagrangianParams<T>,
}

impl<T: Scalar> LagrangianObjective<T> {
    pub fn new(mdp: MdpModel<T>, params: LagrangianParams<T>) -> Result<Self> {
        check_dim(mdp.states() * mdp.actions(), params.coupling.rows())?;
        Ok(Self { mdp, params })
    }

    pub fn mdp(&self) -> &MdpModel<T> {
        &self.mdp
    }

    pub fn params(&self) -> &LagrangianParams<T> {
        &self.params
    }
}

impl<T: Scalar> Objective<T> for LagrangianObjective<T> {
    fn dims(&self) -> (usize, usize) {
        (self.mdp.states(), self.mdp.states() * self.mdp.actions())
    }

    fn value(&self, h: &Vector<T>, d: &Vector<T>) -> Result<T> {
        lagrangian_value(d, h, &self.mdp, &self.params)
    }

    fn grad_x(&self, h: &Vector<T>, d: &Vector<T>) -> Result<Vector<T>> {
        grad_h(d, h, &self.mdp, &self.params)
    }

    fn grad_y(&self, h: &Vector<T>, d: &Vector<T>) -> Result<Vector<T>> {
        grad_d(d, h, &self.mdp, &self.params)
    }

    fn smoothness(&self) -> Smoothness<T> {
        Smoothness {
            xx: T::zero(),
            xy: self.params.coupling_norm,
            yy: self.params.lambda,
        }
    }

    /// Linear in `h`: a vertex of the domain.
    fn best_response_x(&self, d: &Vector<T>, dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        Some(
            grad_h(d, &Vector::zeros(self.mdp.states()), &self.mdp, &self.params)
                .and_then(|g| dom.linear_minimizer(&g)),
        )
    }

    /// Isotropic concave quadratic in `d`: the projection of `(r + Kh)/λ`.
    fn best_response_y(&self, h: &Vector<T>, dom: &dyn Domain<T>) -> Option<Result<Vector<T>>> {
        let n = self.mdp.states() * self.mdp.actions();
        Some(
            grad_d(&Vector::zeros(n), h, &self.mdp, &self.params)
                .and_then(|g| dom.project(&g.scale(T::one() / self.params.lambda))),
        )
    }
}
