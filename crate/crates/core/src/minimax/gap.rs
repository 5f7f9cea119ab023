use crate::domains::{Domain, Objective, Vector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `max_{y ∈ dom_y} f(x̄, y) − min_{x ∈ dom_x} f(x, ȳ)`, evaluated through the objective's
/// closed-form best responses.
pub fn duality_gap<T: Scalar, O: Objective<T> + ?Sized>(
    objective: &O,
    dom_x: &dyn Domain<T>,
    dom_y: &dyn Domain<T>,
    x_bar: &Vector<T>,
    y_bar: &Vector<T>,
) -> Result<T> {
    let y_best = objective
        .best_response_y(x_bar, dom_y)
        .ok_or(Error::Unsupported("no best-response oracle for y"))??;
    let x_best = objective
        .best_response_x(y_bar, dom_x)
        .ok_or(Error::Unsupported("no best-response oracle for x"))??;
    let gap = objective.value(x_bar, &y_best)? - objective.value(&x_best, y_bar)?;
    if gap.is_finite() {
        Ok(gap)
    } else {
        Err(Error::NonFinite("duality gap"))
    }
}
