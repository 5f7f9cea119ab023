use crate::error::{Error, Result};

/// Problem constants entering the estimation-error guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationSetting {
    pub gamma: f64,
    /// Coverage floor `B ≤ min_{s,a} d_n(s,a)`.
    pub coverage: f64,
    pub h_max: f64,
    /// Reward magnitude bound `R`.
    pub reward_bound: f64,
    pub states: usize,
    pub actions: usize,
}

/// `(E1, E2)` for batches of `m` samples at corruption level `ε` and confidence `1−δ`:
///
/// `E1 = 4/((1−γ)²B)·(√(S·log(4S/δ))/√m + ε)`,
/// `E2 = 6√(SA)(2h_max+R)/((1−γ)B)·(√(2·log(4SA/δ))/√m + 2ε)`.
pub fn estimation_error_bounds(m: usize, epsilon: f64, delta: f64, setting: &EstimationSetting) -> Result<(f64, f64)> {
    let EstimationSetting { gamma, coverage, h_max, reward_bound, states, actions } = *setting;
    let bad = |what: &str| Err(Error::Domain(what.to_string()));
    if m == 0 {
        return bad("batch size must be positive");
    }
    if !(0.0..0.5).contains(&epsilon) {
        return bad("corruption level must lie in [0, 0.5)");
    }
    if !(delta > 0.0 && delta < 1.0) {
        return bad("confidence parameter must lie in (0, 1)");
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return bad("discount must lie in (0, 1)");
    }
    if !(coverage > 0.0 && h_max > 0.0 && reward_bound > 0.0) || states == 0 || actions == 0 {
        return bad("coverage, h_max, reward bound and sizes must be positive");
    }
    let s = states as f64;
    let sa = (states * actions) as f64;
    let root_m = (m as f64).sqrt();
    let e1 = 4.0 / ((1.0 - gamma).powi(2) * coverage) * ((s * (4.0 * s / delta).ln()).sqrt() / root_m + epsilon);
    let e2 = 6.0 * sa.sqrt() * (2.0 * h_max + reward_bound) / ((1.0 - gamma) * coverage)
        * ((2.0 * (4.0 * sa / delta).ln()).sqrt() / root_m + 2.0 * epsilon);
    Ok((e1, e2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting() -> EstimationSetting {
        EstimationSetting {
            gamma: 0.5,
            coverage: 0.1,
            h_max: 2.0,
            reward_bound: 1.0,
            states: 4,
            actions: 2,
        }
    }

    #[test]
    fn e1_direct_evaluation() {
        let (e1, _) = estimation_error_bounds(100, 0.0, 0.1, &setting()).unwrap();
        // 4/((1−γ)²B) = 160 and 4S/δ = 160.
        let expected = 160.0 * (4.0 * 160.0f64.ln()).sqrt() / 10.0;
        assert!((e1 - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn linear_in_epsilon() {
        let (a1, a2) = estimation_error_bounds(100, 0.1, 0.1, &setting()).unwrap();
        let (b1, b2) = estimation_error_bounds(100, 0.2, 0.1, &setting()).unwrap();
        assert!((b1 - a1 - 160.0 * 0.1).abs() < 1e-9);
        let slope2 = 6.0 * 8.0f64.sqrt() * 5.0 / 0.05 * 2.0;
        assert!((b2 - a2 - slope2 * 0.1).abs() < 1e-9);
    }

    #[test]
    fn vanishes_with_data() {
        let (e1, e2) = estimation_error_bounds(usize::MAX / 2, 0.0, 0.1, &setting()).unwrap();
        assert!(e1 < 1e-6 && e2 < 1e-5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(estimation_error_bounds(0, 0.0, 0.1, &setting()).is_err());
        assert!(estimation_error_bounds(10, 0.5, 0.1, &setting()).is_err());
        assert!(estimation_error_bounds(10, 0.0, 1.0, &setting()).is_err());
        let mut s = setting();
        s.coverage = 0.0;
        assert!(estimation_error_bounds(10, 0.0, 0.1, &s).is_err());
    }
}
